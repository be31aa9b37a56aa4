#pragma once

// One-stop summary of a box: NS validity, locality, Tsirelson bound,
// the information-causality necessary test and the macroscopic-limit label.

#include <optional>
#include <string>
#include <vector>

#include "macrobell/box.hpp"
#include "macrobell/ic.hpp"
#include "macrobell/macro.hpp"
#include "macrobell/polytope.hpp"
#include "macrobell/voting.hpp"

namespace macrobell {

struct ClassifyOptions {
  std::vector<int> ms = m_range(2, 200, 2);
  VotingRule rule = VotingRule::majority();
  int window = kDefaultLimitWindow;
  double limit_tol = kDefaultLimitTol;
  unsigned workers = 0;
};

struct ClassificationReport {
  MembershipVerdict no_signaling;
  std::optional<MembershipVerdict> local;  // absent when the table is not a valid box
  ChshReport chsh;
  bool tsirelson = false;  // necessary for a quantum realization, not sufficient
  IcReport ic;
  std::optional<LimitLabel> limit;
};

inline ClassificationReport classify(const Table& table, const ClassifyOptions& opt = {}) {
  ClassificationReport r;
  r.no_signaling = is_no_signaling(table);
  r.chsh = chsh_table(table);
  if (!r.no_signaling.in_set) return r;
  const Box box = make_box(table);
  r.local = is_local(box);
  r.tsirelson = tsirelson_check(box);
  r.ic = ic_necessary(box);
  r.limit = limit_classify(macro_chsh_trace(box, opt.ms, opt.rule, opt.workers), opt.window, opt.limit_tol);
  return r;
}

inline ClassificationReport classify(const Box& box, const ClassifyOptions& opt = {}) {
  return classify(box.table(), opt);
}

}  // namespace macrobell
