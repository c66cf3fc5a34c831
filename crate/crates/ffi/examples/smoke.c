#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "spectral_complexity.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        SpcStatus st_ = (call);                                            \
        if (st_ != SPC_STATUS_OK) {                                        \
            const char *m_ = spc_last_error_message();                     \
            fprintf(stderr, "%s -> %d: %s\n", #call, st_, m_ ? m_ : "");   \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    /* Unit lattice with a small bump: regular at level 0. */
    double v[8];
    for (int i = 0; i < 8; i++) v[i] = i + 0.5 + (i == 3 ? 0.2 : 0.0);

    SpcSequence *seq = NULL;
    CHECK(spc_sequence_new(v, 8, &seq));

    SpcModel model = {SPC_MODEL_KIND_WEYL_LINEAR, 3.14159265358979323846, 0.0};
    SpcHierarchy *h = NULL;
    CHECK(spc_hierarchy_build(seq, &model, SPC_STRATEGY_KIND_OPTIMAL_MIDRANGE, 8, &h));

    int64_t degree = -2;
    CHECK(spc_hierarchy_degree(h, &degree));
    char *json = NULL;
    CHECK(spc_hierarchy_report_json(h, &json));
    printf("degree %lld\n%s", (long long)degree, json);
    spc_string_free(json);

    SpcSequence *bad = NULL;
    double dup[2] = {1.0, 1.0};
    if (spc_sequence_new(dup, 2, &bad) != SPC_STATUS_SEQUENCE) return 2;

    size_t n = 0;
    SpcStatus st = spc_sequence_values(seq, NULL, 0, &n);
    if (st != SPC_STATUS_BUFFER_TOO_SMALL || n != 8) return 3;

    spc_hierarchy_free(h);
    spc_sequence_free(seq);
    return degree == 0 ? 0 : 4;
}
