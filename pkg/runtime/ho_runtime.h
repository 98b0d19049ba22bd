/*
 * ho_runtime.h -- the runtime ABI for C code generated by hoc.
 *
 * Generated translation units include exactly this header and are compiled
 * with: -fno-strict-aliasing -fwrapv -std=gnu99
 *
 * Conventions shared with the generated code:
 *   - all expression values travel as int64_t; variables hold their own
 *     C type and are widened on load, truncated on store;
 *   - runtime entry points do nothing when ctx->fault is set, so a faulted
 *     module body cannot produce further effects before it unwinds;
 *   - dynamic checks (division/modulo, shifts, array bounds, empty-port
 *     access, narrowing, contracts) are compiled out with -DNDEBUG; the
 *     allocation-protocol checks (pool exhaustion, NEW/CLONE on a full
 *     port, EXTEND range) stay active in every build.
 */
#ifndef HO_RUNTIME_H
#define HO_RUNTIME_H

#include <stdint.h>
#include <stddef.h>

#define HO_BLOCK_SIZE 4096u
#define HO_MAX_POOL 256u

typedef struct ho_block {
    struct ho_block *next;      /* free-list link */
    uint32_t used;
    uint8_t bytes[HO_BLOCK_SIZE];
} ho_block;

typedef struct {
    ho_block *blk;              /* NULL when the port is empty */
} ho_port;

typedef struct {
    uint8_t is_mmio;            /* 1: addr is an external bus address */
    uint32_t addr;
    void *mem;                  /* plain memory target when not MMIO */
} ho_ptr;

typedef struct {
    uint32_t id;                /* check ids are 1-based and dense */
    const char *kind;
    const char *file;
    uint32_t line;
    uint32_t col;
} ho_check_site;

typedef struct ho_ctx ho_ctx;
typedef void (*ho_body_fn)(ho_ctx *ctx, void *data);

typedef struct {
    const char *name;
    uint32_t module_id;
    uint32_t instance;
    ho_body_fn body;
    size_t data_size;
} ho_module_desc;

typedef struct {
    uint32_t addr;
    int count;                  /* scripted values */
    int next;
    int64_t values[64];
} ho_mmio_entry;

struct ho_ctx {
    int fault;                  /* set by the first failed check of a body */
    int fatal;                  /* pool exhaustion ends the run */
    int any_fault;
    ho_block *free_list;
    uint32_t pool_capacity;
    uint32_t pool_free;
    const char *cur_module;
    uint32_t cur_instance;
    const ho_check_site *sites;
    uint32_t n_sites;
    const ho_module_desc *mods;
    uint32_t n_mods;
    void **data;
    ho_mmio_entry *mmio;
    int n_mmio;
    int mmio_strict;
    uint32_t cycle;
};

/* check hook and transcript output */
void ho_fail(ho_ctx *ctx, uint32_t check_id, const char *kind);
void ho_log(ho_ctx *ctx, const char *text, int has_value, int64_t value);

/* port and pool operations (protocol checks always active) */
void ho_new(ho_ctx *ctx, uint32_t site, ho_port *p, int64_t size);
void ho_dispose(ho_ctx *ctx, ho_port *p);
int64_t ho_send(ho_ctx *ctx, ho_port *src, ho_port *dst);
void ho_clone(ho_ctx *ctx, uint32_t site, ho_port *src, ho_port *dst);
int64_t ho_pending(const ho_port *p);

/* debug-checked port accessors, compiled out with NDEBUG */
void ho_extend_ck(ho_ctx *ctx, uint32_t site, ho_port *p, int64_t delta);
void ho_extend_nc(ho_ctx *ctx, uint32_t site, ho_port *p, int64_t delta);
int64_t ho_count_ck(ho_ctx *ctx, uint32_t site, ho_port *p);
int64_t ho_count_nc(ho_ctx *ctx, ho_port *p);
uint8_t *ho_data_ck(ho_ctx *ctx, uint32_t site, ho_port *p);
uint8_t *ho_data_nc(ho_ctx *ctx, ho_port *p);

/* module data lookup (by program-local id, or by name across units) */
void *ho_mdata(ho_ctx *ctx, uint32_t module_id);
void *ho_mdata_named(ho_ctx *ctx, const char *name, uint32_t instance);

/* pointer access; width in bytes, sign for loads */
int64_t ho_ptr_load(ho_ctx *ctx, uint32_t site, ho_ptr p, int width, int sgn);
void ho_ptr_store(ho_ctx *ctx, uint32_t site, ho_ptr p, int width, int64_t v);

/* driver: config parsing, scheduling, exit code (0 clean, 3 faulted) */
int ho_main(int argc, char **argv, const ho_module_desc *mods, uint32_t nmods,
            const ho_check_site *sites, uint32_t nsites);

/* ---- arithmetic helpers: 64-bit evaluation, 32-bit shift patterns ---- */

static inline int64_t ho_div_raw(int64_t a, int64_t b)
{
    if (b == -1) return (int64_t)(0 - (uint64_t)a);   /* INT64_MIN / -1 */
    return a / b;
}

static inline int64_t ho_mod_raw(int64_t a, int64_t b)
{
    if (b == -1) return 0;
    return a % b;
}

static inline int64_t ho_div_ck(ho_ctx *c, uint32_t s, int64_t a, int64_t b)
{
    if (b == 0) { ho_fail(c, s, "div-zero"); return 0; }
    return ho_div_raw(a, b);
}

static inline int64_t ho_mod_ck(ho_ctx *c, uint32_t s, int64_t a, int64_t b)
{
    if (b == 0) { ho_fail(c, s, "div-zero"); return 0; }
    return ho_mod_raw(a, b);
}

static inline int64_t ho_shl_raw(int64_t a, int64_t b)
{
    return (int64_t)(uint32_t)((uint32_t)a << (b & 31));
}

static inline int64_t ho_shr_raw(int64_t a, int64_t b)
{
    return (int64_t)((uint32_t)a >> (b & 31));
}

static inline int64_t ho_shl_ck(ho_ctx *c, uint32_t s, int64_t a, int64_t b)
{
    if (b < 0 || b >= 32) { ho_fail(c, s, "shift-range"); return 0; }
    return ho_shl_raw(a, b);
}

static inline int64_t ho_shr_ck(ho_ctx *c, uint32_t s, int64_t a, int64_t b)
{
    if (b < 0 || b >= 32) { ho_fail(c, s, "shift-range"); return 0; }
    return ho_shr_raw(a, b);
}

static inline int64_t ho_idx_ck(ho_ctx *c, uint32_t s, int64_t i, int64_t n)
{
    if (i < 0 || i >= n) { ho_fail(c, s, "array-bounds"); return 0; }
    return i;
}

static inline int64_t ho_idx_nc(int64_t i, int64_t n)
{
    return (i >= 0 && i < n) ? i : 0;
}

#define HO_NARROW_CK(name, ctype, lo, hi) \
    static inline int64_t name(ho_ctx *c, uint32_t s, int64_t v) \
    { \
        if (v < (int64_t)(lo) || v > (int64_t)(hi)) { \
            ho_fail(c, s, "narrowing"); return 0; \
        } \
        return (int64_t)(ctype)v; \
    }

HO_NARROW_CK(ho_narrow_u8_ck, uint8_t, 0, 255)
HO_NARROW_CK(ho_narrow_u16_ck, uint16_t, 0, 65535)
HO_NARROW_CK(ho_narrow_u32_ck, uint32_t, 0, 4294967295LL)
HO_NARROW_CK(ho_narrow_s8_ck, int8_t, -128, 127)
HO_NARROW_CK(ho_narrow_s16_ck, int16_t, -32768, 32767)
HO_NARROW_CK(ho_narrow_s32_ck, int32_t, -2147483648LL, 2147483647LL)
#undef HO_NARROW_CK

#ifdef NDEBUG
#define HO_DIV(c, s, a, b) (((b) == 0) ? 0 : ho_div_raw((a), (b)))
#define HO_MOD(c, s, a, b) (((b) == 0) ? 0 : ho_mod_raw((a), (b)))
#define HO_SHL(c, s, a, b) ((((b) < 0) || ((b) >= 32)) ? 0 : ho_shl_raw((a), (b)))
#define HO_SHR(c, s, a, b) ((((b) < 0) || ((b) >= 32)) ? 0 : ho_shr_raw((a), (b)))
#define HO_IDX(c, s, i, n) ho_idx_nc((i), (n))
#define HO_NARROW_U8(c, s, v) ((int64_t)(uint8_t)(v))
#define HO_NARROW_U16(c, s, v) ((int64_t)(uint16_t)(v))
#define HO_NARROW_U32(c, s, v) ((int64_t)(uint32_t)(v))
#define HO_NARROW_S8(c, s, v) ((int64_t)(int8_t)(v))
#define HO_NARROW_S16(c, s, v) ((int64_t)(int16_t)(v))
#define HO_NARROW_S32(c, s, v) ((int64_t)(int32_t)(v))
#define HO_EXTEND(c, s, p, d) ho_extend_nc((c), (s), (p), (d))
#define HO_COUNT(c, s, p) ho_count_nc((c), (p))
#define HO_DATA(c, s, p) ho_data_nc((c), (p))
#else
#define HO_DIV(c, s, a, b) ho_div_ck((c), (s), (a), (b))
#define HO_MOD(c, s, a, b) ho_mod_ck((c), (s), (a), (b))
#define HO_SHL(c, s, a, b) ho_shl_ck((c), (s), (a), (b))
#define HO_SHR(c, s, a, b) ho_shr_ck((c), (s), (a), (b))
#define HO_IDX(c, s, i, n) ho_idx_ck((c), (s), (i), (n))
#define HO_NARROW_U8(c, s, v) ho_narrow_u8_ck((c), (s), (v))
#define HO_NARROW_U16(c, s, v) ho_narrow_u16_ck((c), (s), (v))
#define HO_NARROW_U32(c, s, v) ho_narrow_u32_ck((c), (s), (v))
#define HO_NARROW_S8(c, s, v) ho_narrow_s8_ck((c), (s), (v))
#define HO_NARROW_S16(c, s, v) ho_narrow_s16_ck((c), (s), (v))
#define HO_NARROW_S32(c, s, v) ho_narrow_s32_ck((c), (s), (v))
#define HO_EXTEND(c, s, p, d) ho_extend_ck((c), (s), (p), (d))
#define HO_COUNT(c, s, p) ho_count_ck((c), (s), (p))
#define HO_DATA(c, s, p) ho_data_ck((c), (s), (p))
#endif

#endif /* HO_RUNTIME_H */
