#include <stdio.h>
#include <string.h>

#include "cyclepack.h"

#define CHECK(cond)                                                        \
    do {                                                                   \
        if (!(cond)) {                                                     \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond, \
                    cp_last_error());                                      \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    /* bidirected triangle: 3 digons and 2 triangles */
    uintptr_t arcs[] = {0, 1, 1, 0, 1, 2, 2, 1, 0, 2, 2, 0};
    CpDigraph *d = NULL;
    CHECK(cp_digraph_from_arcs(3, arcs, 6, &d) == CP_STATUS_OK);
    CHECK(cp_digraph_vertex_count(d) == 3);

    uintptr_t cycles = 0;
    CHECK(cp_count_cycles(d, 100, &cycles) == CP_STATUS_OK);
    CHECK(cycles == 5);

    char *train = NULL;
    CHECK(cp_find_k_train(d, 2, &train) == CP_STATUS_OK);
    CHECK(strstr(train, "\"back\":[0,1]") != NULL);
    cp_string_free(train);

    bool ok = false;
    const char *good = "{\"cycles\":[[0,1]],\"claim\":{\"kind\":\"distinct-lengths\"}}";
    CHECK(cp_verify_packing(d, good, &ok, NULL) == CP_STATUS_OK && ok);
    const char *clash = "{\"cycles\":[[0,1],[1,2]],\"claim\":{\"kind\":\"distinct-lengths\"}}";
    char *report = NULL;
    CHECK(cp_verify_packing(d, clash, &ok, &report) == CP_STATUS_OK && !ok);
    CHECK(strstr(report, "overlap") != NULL);
    cp_string_free(report);

    CHECK(cp_find_k_train(d, 3, &train) == CP_STATUS_PRECONDITION);
    CHECK(strlen(cp_last_error()) > 0);
    cp_digraph_free(d);

    CHECK(cp_digraph_from_json("{\"n\":", &d) == CP_STATUS_FORMAT);
    printf("ok %s\n", cp_version());
    return 0;
}
