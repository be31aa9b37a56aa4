// Majority-vote coarse-graining of M copies of a PR box and of a noisy
// Class-I mixture; prints the CHSH value per M, exact and sampled.

#include <cstdio>

#include "macrobell.hpp"

using namespace macrobell;

int main() {
  const VotingRule rule = VotingRule::majority();
  const Box noisy = class_generator(ClassId::I, {0.8}).box;

  std::printf("%5s %12s %12s %12s %22s\n", "M", "PR", "PR odd M+1", "class I 0.8", "PR sampled (1e5)");
  for (int m : {2, 4, 10, 20, 50, 100, 200}) {
    const double even = trace_point(macro_box(pr_box(), m, rule)).chsh;
    const double odd = trace_point(macro_box(pr_box(), m + 1, rule)).chsh;
    const double cls = trace_point(macro_box(noisy, m, rule)).chsh;
    const McChsh mc = mc_chsh(pr_box(), m, rule, 100000, 1);
    std::printf("%5d %12.6f %12.6f %12.6f %12.6f +- %.6f\n", m, even, odd, cls, mc.estimate, mc.standard_error);
  }

  const auto trace = macro_chsh_trace(pr_box(), m_range(2, 200, 2), rule);
  const LimitLabel l = limit_classify(trace);
  std::printf("\nPR limit label: %s (I = %.6f at M = 200)\n", to_string(l.label).c_str(), l.final_value);
  return 0;
}
