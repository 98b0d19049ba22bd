/*
 * ho_runtime.c -- block pool, ports, cyclic scheduler, check hook and LOG
 * shim for programs emitted by hoc.
 *
 * The library allocates nothing after initialization: module data lives in
 * a static arena and message blocks in a static pool.  Debug output goes to
 * standard output (the desk-scale stand-in for a UART), one event per line:
 *
 *     LOG <module> <instance> "<text>"[ <value>]
 *     FAULT <kind> <check-id> <module> <instance> <file>:<line>
 */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "ho_runtime.h"

#define HO_ARENA_SIZE (1u << 16)
#define HO_MAX_MODULES 64
#define HO_MAX_MMIO 32

static uint8_t ho_arena[HO_ARENA_SIZE];
static ho_block ho_pool_storage[HO_MAX_POOL];
static void *ho_data_ptrs[HO_MAX_MODULES];
static ho_mmio_entry ho_mmio_table[HO_MAX_MMIO];
static uint8_t ho_scratch[HO_BLOCK_SIZE];

/* ---- transcript ---------------------------------------------------- */

void ho_log(ho_ctx *ctx, const char *text, int has_value, int64_t value)
{
    if (ctx->fault)
        return;
    if (has_value)
        printf("LOG %s %u \"%s\" %lld\n", ctx->cur_module, ctx->cur_instance,
               text, (long long)value);
    else
        printf("LOG %s %u \"%s\"\n", ctx->cur_module, ctx->cur_instance, text);
}

void ho_fail(ho_ctx *ctx, uint32_t check_id, const char *kind)
{
    const char *file = "?";
    uint32_t line = 0;

    if (ctx->fault)
        return;                 /* only the first fault of a body reports */
    ctx->fault = 1;
    ctx->any_fault = 1;
    if (check_id >= 1 && check_id <= ctx->n_sites) {
        file = ctx->sites[check_id - 1].file;
        line = ctx->sites[check_id - 1].line;
    }
    printf("FAULT %s %u %s %u %s:%u\n", kind, check_id, ctx->cur_module,
           ctx->cur_instance, file, line);
    if (strcmp(kind, "pool-exhausted") == 0)
        ctx->fatal = 1;
}

/* ---- pool and ports -------------------------------------------------- */

static ho_block *ho_alloc(ho_ctx *ctx)
{
    ho_block *b = ctx->free_list;

    if (b == NULL)
        return NULL;
    ctx->free_list = b->next;
    ctx->pool_free--;
    return b;
}

static void ho_free(ho_ctx *ctx, ho_block *b)
{
#ifndef NDEBUG
    ho_block *scan;             /* audit: reject blocks not owned by a port */

    for (scan = ctx->free_list; scan != NULL; scan = scan->next)
        if (scan == b) {
            fprintf(stderr, "ho_runtime: double free of a message block\n");
            abort();
        }
#endif
    b->next = ctx->free_list;   /* freed blocks go to the front */
    ctx->free_list = b;
    ctx->pool_free++;
}

void ho_new(ho_ctx *ctx, uint32_t site, ho_port *p, int64_t size)
{
    ho_block *b;

    if (ctx->fault)
        return;
    if (p->blk != NULL) {
        ho_fail(ctx, site, "new-on-full-port");
        return;
    }
    if (size <= 0 || size > (int64_t)HO_BLOCK_SIZE) {
        ho_fail(ctx, site, "extend-range");
        return;
    }
    b = ho_alloc(ctx);
    if (b == NULL) {
        ho_fail(ctx, site, "pool-exhausted");
        return;
    }
    b->used = (uint32_t)size;
    memset(b->bytes, 0xAA, HO_BLOCK_SIZE);
    p->blk = b;
}

void ho_dispose(ho_ctx *ctx, ho_port *p)
{
    if (ctx->fault)
        return;
    if (p->blk != NULL) {
        ho_free(ctx, p->blk);
        p->blk = NULL;
    }
}

int64_t ho_send(ho_ctx *ctx, ho_port *src, ho_port *dst)
{
    if (ctx->fault)
        return 0;
    if (src->blk != NULL && dst->blk == NULL) {
        dst->blk = src->blk;
        src->blk = NULL;
        return 1;
    }
    return 0;
}

void ho_clone(ho_ctx *ctx, uint32_t site, ho_port *src, ho_port *dst)
{
    ho_block *b;

    if (ctx->fault)
        return;
    if (dst->blk != NULL) {
        ho_fail(ctx, site, "new-on-full-port");
        return;
    }
    if (src->blk == NULL)
        return;
    b = ho_alloc(ctx);
    if (b == NULL) {
        ho_fail(ctx, site, "pool-exhausted");
        return;
    }
    memcpy(b->bytes, src->blk->bytes, HO_BLOCK_SIZE);
    b->used = src->blk->used;
    dst->blk = b;
}

int64_t ho_pending(const ho_port *p)
{
    return p->blk != NULL;
}

void ho_extend_ck(ho_ctx *ctx, uint32_t site, ho_port *p, int64_t delta)
{
    if (ctx->fault)
        return;
    if (p->blk == NULL) {
        ho_fail(ctx, site, "empty-port");
        return;
    }
    ho_extend_nc(ctx, site, p, delta);
}

void ho_extend_nc(ho_ctx *ctx, uint32_t site, ho_port *p, int64_t delta)
{
    int64_t used;

    if (ctx->fault || p->blk == NULL)
        return;
    used = (int64_t)p->blk->used + delta;
    if (used < 0 || used > (int64_t)HO_BLOCK_SIZE) {
        ho_fail(ctx, site, "extend-range");    /* protocol check: always on */
        return;
    }
    p->blk->used = (uint32_t)used;
}

int64_t ho_count_ck(ho_ctx *ctx, uint32_t site, ho_port *p)
{
    if (ctx->fault)
        return 0;
    if (p->blk == NULL) {
        ho_fail(ctx, site, "empty-port");
        return 0;
    }
    return p->blk->used;
}

int64_t ho_count_nc(ho_ctx *ctx, ho_port *p)
{
    if (ctx->fault || p->blk == NULL)
        return 0;
    return p->blk->used;
}

uint8_t *ho_data_ck(ho_ctx *ctx, uint32_t site, ho_port *p)
{
    if (p->blk == NULL) {
        if (!ctx->fault)
            ho_fail(ctx, site, "empty-port");
        memset(ho_scratch, 0, sizeof(ho_scratch));
        return ho_scratch;
    }
    return p->blk->bytes;
}

uint8_t *ho_data_nc(ho_ctx *ctx, ho_port *p)
{
    (void)ctx;
    if (p->blk == NULL) {
        memset(ho_scratch, 0, sizeof(ho_scratch));
        return ho_scratch;
    }
    return p->blk->bytes;
}

/* ---- module data ------------------------------------------------------ */

void *ho_mdata(ho_ctx *ctx, uint32_t module_id)
{
    uint32_t i;

    for (i = 0; i < ctx->n_mods; i++)
        if (ctx->mods[i].module_id == module_id)
            return ctx->data[i];
    fprintf(stderr, "ho_runtime: no module with id %u\n", module_id);
    exit(1);
}

void *ho_mdata_named(ho_ctx *ctx, const char *name, uint32_t instance)
{
    uint32_t i;

    for (i = 0; i < ctx->n_mods; i++)
        if (strcmp(ctx->mods[i].name, name) == 0 &&
            ctx->mods[i].instance == instance)
            return ctx->data[i];
    fprintf(stderr, "ho_runtime: module %s[%u] is not linked into this "
            "image\n", name, instance);
    exit(1);
}

/* ---- MMIO shim -------------------------------------------------------- */

static ho_mmio_entry *ho_mmio_find(ho_ctx *ctx, uint32_t addr)
{
    int i;

    for (i = 0; i < ctx->n_mmio; i++)
        if (ctx->mmio[i].addr == addr)
            return &ctx->mmio[i];
    return NULL;
}

static int64_t ho_mmio_read(ho_ctx *ctx, uint32_t site, uint32_t addr)
{
    ho_mmio_entry *e = ho_mmio_find(ctx, addr);

    if (e == NULL || e->count == 0) {
        if (ctx->mmio_strict && e == NULL)
            ho_fail(ctx, site, "mmio-trap");
        return 0;
    }
    if (e->next < e->count - 1)
        return e->values[e->next++];
    return e->values[e->count - 1];
}

static void ho_mmio_write(ho_ctx *ctx, uint32_t site, uint32_t addr)
{
    if (ctx->mmio_strict && ho_mmio_find(ctx, addr) == NULL)
        ho_fail(ctx, site, "mmio-trap");
    /* writes are not stored; the scripted map is read-only state */
}

int64_t ho_ptr_load(ho_ctx *ctx, uint32_t site, ho_ptr p, int width, int sgn)
{
    int64_t raw;

    if (ctx->fault)
        return 0;
    if (p.is_mmio || p.mem == NULL)
        raw = ho_mmio_read(ctx, site, p.addr);
    else if (width == 1)
        raw = sgn ? (int64_t)*(int8_t *)p.mem : (int64_t)*(uint8_t *)p.mem;
    else if (width == 2)
        raw = sgn ? (int64_t)*(int16_t *)p.mem : (int64_t)*(uint16_t *)p.mem;
    else
        raw = sgn ? (int64_t)*(int32_t *)p.mem : (int64_t)*(uint32_t *)p.mem;
    if (width == 1)
        return sgn ? (int64_t)(int8_t)raw : (int64_t)(uint8_t)raw;
    if (width == 2)
        return sgn ? (int64_t)(int16_t)raw : (int64_t)(uint16_t)raw;
    return sgn ? (int64_t)(int32_t)raw : (int64_t)(uint32_t)raw;
}

void ho_ptr_store(ho_ctx *ctx, uint32_t site, ho_ptr p, int width, int64_t v)
{
    if (ctx->fault)
        return;
    if (p.is_mmio || p.mem == NULL) {
        ho_mmio_write(ctx, site, p.addr);
        return;
    }
    if (width == 1)
        *(uint8_t *)p.mem = (uint8_t)v;
    else if (width == 2)
        *(uint16_t *)p.mem = (uint16_t)v;
    else
        *(uint32_t *)p.mem = (uint32_t)v;
}

/* ---- configuration ------------------------------------------------------ */

static int ho_read_config(ho_ctx *ctx, const char *path, uint32_t *capacity)
{
    char line[512];
    FILE *f = fopen(path, "r");
    int lineno = 0;

    if (f == NULL) {
        fprintf(stderr, "ho_runtime: cannot read config %s\n", path);
        return -1;
    }
    while (fgets(line, sizeof(line), f)) {
        char *tok = strtok(line, " \t\r\n");
        lineno++;
        if (tok == NULL || tok[0] == '#')
            continue;
        if (strcmp(tok, "pool") == 0) {
            *capacity = (uint32_t)strtoul(strtok(NULL, " \t\r\n"), NULL, 10);
        } else if (strcmp(tok, "mmio") == 0) {
            ho_mmio_entry *e;
            if (ctx->n_mmio >= HO_MAX_MMIO)
                goto bad;
            e = &ctx->mmio[ctx->n_mmio++];
            e->addr = (uint32_t)strtoul(strtok(NULL, " \t\r\n"), NULL, 16);
            e->count = 0;
            e->next = 0;
            while ((tok = strtok(NULL, " \t\r\n")) != NULL && e->count < 64)
                e->values[e->count++] = strtoll(tok, NULL, 0);
        } else if (strcmp(tok, "mmio-strict") == 0) {
            ctx->mmio_strict = 1;
        } else if (strcmp(tok, "nocheck") == 0) {
            /* compiled images switch checks with -DNDEBUG instead */
        } else {
            goto bad;
        }
    }
    fclose(f);
    return 0;
bad:
    fprintf(stderr, "ho_runtime: bad config line %d in %s\n", lineno, path);
    fclose(f);
    return -1;
}

/* ---- cyclic executive ----------------------------------------------------- */

int ho_main(int argc, char **argv, const ho_module_desc *mods, uint32_t nmods,
            const ho_check_site *sites, uint32_t nsites)
{
    ho_ctx ctx;
    uint32_t capacity = 32;
    long cycles = 1;
    size_t arena_used = 0;
    uint32_t i;
    long c;

    memset(&ctx, 0, sizeof(ctx));
    ctx.mods = mods;
    ctx.n_mods = nmods;
    ctx.sites = sites;
    ctx.n_sites = nsites;
    ctx.data = ho_data_ptrs;
    ctx.mmio = ho_mmio_table;

    for (i = 1; i < (uint32_t)argc; i++) {
        if (strcmp(argv[i], "--cycles") == 0 && i + 1 < (uint32_t)argc) {
            cycles = strtol(argv[++i], NULL, 10);
        } else if (strcmp(argv[i], "--config") == 0 && i + 1 < (uint32_t)argc) {
            if (ho_read_config(&ctx, argv[++i], &capacity) != 0)
                return 2;
        } else {
            fprintf(stderr, "usage: %s [--cycles N] [--config FILE]\n", argv[0]);
            return 2;
        }
    }
    if (capacity < 1 || capacity > HO_MAX_POOL) {
        fprintf(stderr, "ho_runtime: pool capacity %u out of range\n", capacity);
        return 2;
    }
    if (nmods > HO_MAX_MODULES) {
        fprintf(stderr, "ho_runtime: too many module instances\n");
        return 2;
    }

    /* free list: lowest block first, freed blocks pushed back on the front */
    ctx.free_list = NULL;
    for (i = capacity; i > 0; i--) {
        ho_pool_storage[i - 1].next = ctx.free_list;
        ctx.free_list = &ho_pool_storage[i - 1];
    }
    ctx.pool_capacity = capacity;
    ctx.pool_free = capacity;

    for (i = 0; i < nmods; i++) {
        arena_used = (arena_used + 15u) & ~(size_t)15u;
        if (arena_used + mods[i].data_size > HO_ARENA_SIZE) {
            fprintf(stderr, "ho_runtime: module data arena exhausted\n");
            return 2;
        }
        ho_data_ptrs[i] = &ho_arena[arena_used];    /* zeroed: static storage */
        arena_used += mods[i].data_size;
    }

    for (c = 1; c <= cycles && !ctx.fatal; c++) {
        ctx.cycle = (uint32_t)c;
        for (i = 0; i < nmods; i++) {
            ctx.fault = 0;
            ctx.cur_module = mods[i].name;
            ctx.cur_instance = mods[i].instance;
            mods[i].body(&ctx, ho_data_ptrs[i]);
            if (ctx.fatal)
                break;
        }
    }
    return ctx.any_fault ? 3 : 0;
}
