/* Minimal consumer of the C API: parse, score, embed, run. */
#include <stdio.h>
#include "manifold_gp.h"

#define CHECK(call)                                                        \
  do {                                                                     \
    MgpStatus s_ = (call);                                                 \
    if (s_ != MGP_STATUS_OK) {                                             \
      fprintf(stderr, "%s failed (%d): %s\n", #call, s_, mgp_last_error()); \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(void) {
  double values[12] = {0, 0, 1, 0, 0, 1, 1, 1, 2, 2, 3, 1};
  MgpDataset *ds = NULL;
  CHECK(mgp_dataset_from_array(values, 6, 2, &ds));

  MgpIndividual *ind = NULL;
  CHECK(mgp_individual_parse("(add f0 f1)\n(sigmoid f0)", &ind));
  double complexity = 0, cost = 0;
  CHECK(mgp_individual_complexity(ind, &complexity));
  CHECK(mgp_individual_cost(ind, ds, &cost));
  double emb[12];
  CHECK(mgp_individual_embed(ind, ds, emb, 12));
  char *text = mgp_individual_to_sexpr(ind);
  printf("complexity %g\ncost %.6f\ntrees %zu\n%s", complexity, cost, mgp_individual_n_trees(ind), text);
  mgp_string_free(text);

  MgpIndividual *bad = NULL;
  MgpStatus s = mgp_individual_parse("(foo f0)", &bad);
  printf("bad parse %d: %s\n", s, mgp_last_error());

  MgpRun *run = NULL;
  CHECK(mgp_run(ds, "evo.generations = 3\nevo.population = 8\nevo.neighbourhood = 3\n", &run));
  printf("front %zu\n", mgp_run_front_len(run));

  mgp_run_free(run);
  mgp_individual_free(ind);
  mgp_dataset_free(ds);
  return 0;
}
