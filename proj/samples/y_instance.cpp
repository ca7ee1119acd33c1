// Two unit sources at (-1,0) and (1,0), one sink of weight 2 at (0,2), cost
// C(theta) = |theta|^alpha. Small alpha gives a Y with an interior branch
// point, alpha close to 1 gives a V meeting at the sink.
//
//   ./y_instance [alpha] [out.svg]

#include <cstdlib>
#include <iostream>

#include "branchnet/branchnet.hpp"

using namespace branchnet;

int main(int argc, char** argv) {
  const double alpha = argc > 1 ? std::atof(argv[1]) : 0.5;
  const Chain0 sources{2, 1, {{{-1.0, 0.0}, {1.0}}, {{1.0, 0.0}, {1.0}}}};
  const Chain0 sink{2, 1, {{{0.0, 2.0}, {2.0}}}};
  const CostSpec cost = CostSpec::sum_alpha(alpha, {1.0});

  const LocalSearchResult r = local_search(sources, sink, cost);
  std::cout << "alpha " << alpha << ": energy " << r.report.energy << ", " << r.chain.edges.size() << " edges, "
            << (r.report.ok() ? "verified" : "NOT verified") << '\n';
  for (const Edge& e : r.chain.edges)
    std::cout << "  (" << e.a[0] << ", " << e.a[1] << ") -> (" << e.b[0] << ", " << e.b[1] << ")  theta "
              << e.theta[0] << '\n';
  if (argc > 2) emit_svg(r.chain, sources, sink, {}, argv[2]);
  return r.report.ok() ? 0 : 1;
}
