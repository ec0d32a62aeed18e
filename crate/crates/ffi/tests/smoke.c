#include <stdio.h>
#include <stdlib.h>

#include "sfvg.h"

int main(void) {
    const double values[] = {1.0, 3.0, 2.0, 4.0};
    SfvgGraph *graph = NULL;
    if (sfvg_graph_new(values, 4, SFVG_WEIGHTS_SIGNED, &graph) != SFVG_STATUS_OK) {
        fprintf(stderr, "%s\n", sfvg_last_error());
        return 1;
    }
    size_t n = sfvg_graph_edge_count(graph);
    SfvgEdge *edges = malloc(n * sizeof *edges);
    if (sfvg_graph_edges(graph, edges, n) != SFVG_STATUS_OK) {
        return 1;
    }
    printf("edges=%zu first=(%zu,%zu,%g)\n", n, edges[0].i, edges[0].j, edges[0].w);
    free(edges);
    sfvg_graph_free(graph);

    SfvgStatus status = sfvg_graph_new(values, 4, 9, &graph);
    printf("status=%d error=%s\n", (int)status, sfvg_last_error());
    return 0;
}
