/*
 * Self-test for the runtime library: pool discipline, the SEND truth
 * table, CLONE/EXTEND boundaries.  Exits 0 when every check holds.
 */
#include <assert.h>
#include <stdio.h>
#include <string.h>

#include "ho_runtime.h"

static ho_check_site sites[] = {
    {1u, "test", "test_runtime.c", 1u, 1u},
};

static ho_block storage[4];

static void init_ctx(ho_ctx *ctx, uint32_t capacity)
{
    uint32_t i;

    memset(ctx, 0, sizeof(*ctx));
    ctx->sites = sites;
    ctx->n_sites = 1;
    ctx->cur_module = "selftest";
    ctx->free_list = NULL;
    for (i = capacity; i > 0; i--) {
        storage[i - 1].next = ctx->free_list;
        ctx->free_list = &storage[i - 1];
    }
    ctx->pool_capacity = capacity;
    ctx->pool_free = capacity;
}

int main(void)
{
    ho_ctx ctx;
    ho_port a, b, c;
    ho_block *first;
    int i;

    /* init N, N allocations succeed, the N+1st fails */
    init_ctx(&ctx, 4);
    memset(&a, 0, sizeof(a));
    memset(&b, 0, sizeof(b));
    memset(&c, 0, sizeof(c));
    for (i = 0; i < 4; i++) {
        ho_port p = {0};
        ho_new(&ctx, 1, &p, 16);
        assert(p.blk != NULL);
        p.blk = NULL;                   /* park the block forever */
    }
    assert(ctx.pool_free == 0);
    ho_new(&ctx, 1, &a, 16);
    assert(ctx.fault && ctx.fatal && a.blk == NULL);

    /* alloc then free then alloc returns the same block (LIFO) */
    init_ctx(&ctx, 4);
    ho_new(&ctx, 1, &a, 8);
    first = a.blk;
    ho_dispose(&ctx, &a);
    ho_new(&ctx, 1, &a, 8);
    assert(a.blk == first);
    assert(a.blk->used == 8 && a.blk->bytes[0] == 0xAA);

    /* SEND truth table */
    ho_dispose(&ctx, &a);
    ho_new(&ctx, 1, &a, 8);
    assert(ho_send(&ctx, &a, &b) == 1);          /* full -> empty: moves   */
    assert(a.blk == NULL && b.blk != NULL);
    assert(ho_send(&ctx, &a, &b) == 0);          /* empty -> full: no-op   */
    assert(ho_send(&ctx, &a, &c) == 0);          /* empty -> empty: no-op  */
    ho_new(&ctx, 1, &a, 8);
    assert(ho_send(&ctx, &a, &b) == 0);          /* full -> full: no-op    */
    assert(a.blk != NULL && b.blk != NULL);

    /* CLONE: copies bytes and used size; empty source leaves dst empty */
    a.blk->bytes[3] = 0x5A;
    ho_clone(&ctx, 1, &a, &c);
    assert(c.blk != NULL && c.blk != a.blk);
    assert(c.blk->used == a.blk->used && c.blk->bytes[3] == 0x5A);
    ho_dispose(&ctx, &c);
    ho_dispose(&ctx, &a);
    ho_clone(&ctx, 1, &a, &c);
    assert(c.blk == NULL && !ctx.fault);

    /* EXTEND boundaries: down to zero is fine, past the block is not */
    ho_new(&ctx, 1, &a, 8);
    ho_extend_ck(&ctx, 1, &a, -8);
    assert(a.blk->used == 0 && !ctx.fault);
    ho_extend_ck(&ctx, 1, &a, HO_BLOCK_SIZE);
    assert(a.blk->used == HO_BLOCK_SIZE && !ctx.fault);
    ho_extend_ck(&ctx, 1, &a, 1);
    assert(ctx.fault);
    ctx.fault = 0;

    /* COUNT/DATA on an empty port fault in the checked variants */
    assert(ho_count_ck(&ctx, 1, &b) == b.blk->used);
    ho_dispose(&ctx, &b);
    assert(ho_count_ck(&ctx, 1, &b) == 0 && ctx.fault);
    ctx.fault = 0;
    assert(ho_data_nc(&ctx, &b)[0] == 0);        /* scratch reads as zero */

    /* pool conservation at the end: everything disposed, all blocks free */
    ho_dispose(&ctx, &a);
    ho_dispose(&ctx, &c);
    assert(ctx.pool_free == ctx.pool_capacity);

    puts("runtime self-test ok");
    return 0;
}
