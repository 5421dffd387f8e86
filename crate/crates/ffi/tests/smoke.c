#include <math.h>
#include <stdio.h>
#include <string.h>

#include "moralnet.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__,    \
                    __LINE__, #cond);                                 \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    const char *dic = "%\n1\tHarmVirtue\n2\tPurityVice\n%\ncare\t1\ndirt*\t2\n";
    MnLexicon *lex = NULL;
    CHECK(mn_lexicon_parse((const uint8_t *)dic, strlen(dic), MN_DICT_FORMAT_LIWC,
                           MN_LANGUAGE_EN, &lex) == MN_STATUS_OK);

    MnLoading loading;
    CHECK(mn_score_text(lex, "care about dirty dirt", MN_COUNT_MODE_MULTISET, &loading) ==
          MN_STATUS_OK);
    CHECK(loading.counts[0] == 1 && loading.counts[4] == 2 && loading.matched == 3);
    CHECK(loading.labels == (1 << 4));
    mn_lexicon_free(lex);

    MnNetwork *net = mn_network_new();
    CHECK(mn_network_set_label(net, "a", 0) == MN_STATUS_OK);
    CHECK(mn_network_set_label(net, "b", 0) == MN_STATUS_OK);
    CHECK(mn_network_add_edge(net, "a", "b", 3) == MN_STATUS_OK);
    MnHomophily h;
    CHECK(mn_network_homophily(net, &h) == MN_STATUS_OK);
    CHECK(h.scores[0] == 1.0 && isnan(h.scores[1]));
    CHECK(mn_network_add_edge(net, "a", "a", 1) == MN_STATUS_INVALID_ARGUMENT);
    char *msg = mn_last_error();
    CHECK(msg != NULL && strlen(msg) > 0);
    mn_string_free(msg);
    mn_network_free(net);

    double values[] = {1, 2, 3, 4, 5, 6};
    size_t sizes[] = {3, 3};
    MnKruskalResult kw;
    CHECK(mn_kruskal_wallis(values, sizes, 2, &kw) == MN_STATUS_OK);
    CHECK(fabs(kw.statistic - 27.0 / 7.0) < 1e-12);

    puts("ok");
    return 0;
}
