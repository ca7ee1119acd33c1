// Two commodities travel the same 10-unit corridor. With a cost that charges
// (0.5|theta_1| + 0.5|theta_2|)^alpha, shipping them together is cheaper
// than two parallel lanes; local search finds the shared trunk.
//
//   ./shared_corridor [alpha] [out.json]

#include <cstdlib>
#include <iostream>

#include "branchnet/branchnet.hpp"

using namespace branchnet;

int main(int argc, char** argv) {
  const double alpha = argc > 1 ? std::atof(argv[1]) : 0.5;
  const Chain0 sources{2, 2, {{{0.0, 0.1}, {1.0, 0.0}}, {{0.0, -0.1}, {0.0, 1.0}}}};
  const Chain0 sinks{2, 2, {{{10.0, 0.1}, {1.0, 0.0}}, {{10.0, -0.1}, {0.0, 1.0}}}};
  const CostSpec cost = CostSpec::sum_alpha(alpha, {0.5, 0.5});

  const Chain1 lanes = canonicalize(Chain1{2, 2, {{{0.0, 0.1}, {10.0, 0.1}, {1.0, 0.0}},
                                                  {{0.0, -0.1}, {10.0, -0.1}, {0.0, 1.0}}}});
  const LocalSearchResult r = local_search(sources, sinks, cost);
  std::cout << "separate lanes: " << energy(lanes, cost) << '\n'
            << "local search:   " << r.report.energy << " (" << r.chain.edges.size() << " edges, "
            << r.report.iterations << " sweeps)\n";
  if (argc > 2) save_network(r.chain, argv[2]);
  return r.report.ok() ? 0 : 1;
}
