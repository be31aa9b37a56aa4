#pragma once

#include <string>
#include <vector>

#include "macrobell/error.hpp"

namespace macrobell {

enum class TiePolicy { ZeroWins, OneWins, FairCoin };

/// Binarizes one side's detector counts (n0 of M particles hit detector 0).
///
///   Majority      n0 >= n1 -> 0, otherwise 1 (ties go to 0)
///   Threshold(t)  n0 >= t  -> 0, otherwise 1
///   Unanimous     n1 == 0 -> 0, n0 == 0 -> 1, otherwise the tie policy
///                 (experimental; FairCoin splits the mixed beam evenly)
struct VotingRule {
  enum class Kind { Majority, Threshold, Unanimous };

  Kind kind = Kind::Majority;
  int threshold = 0;
  TiePolicy tie = TiePolicy::ZeroWins;

  static VotingRule majority() { return {Kind::Majority, 0, TiePolicy::ZeroWins}; }
  static VotingRule with_threshold(int t) { return {Kind::Threshold, t, TiePolicy::ZeroWins}; }
  static VotingRule unanimous(TiePolicy tie = TiePolicy::FairCoin) { return {Kind::Unanimous, 0, tie}; }

  /// Probability that the macroscopic outcome is 0, for every n0 in 0..M.
  std::vector<double> zero_probabilities(int m) const {
    if (m < 1) throw Error(ErrorCode::BadParams, "M must be >= 1");
    if (kind == Kind::Threshold && (threshold < 1 || threshold > m))
      throw Error(ErrorCode::BadParams,
                  "threshold " + std::to_string(threshold) + " outside 1.." + std::to_string(m));
    std::vector<double> z(static_cast<std::size_t>(m) + 1);
    for (int n0 = 0; n0 <= m; ++n0) z[static_cast<std::size_t>(n0)] = zero_probability(n0, m);
    return z;
  }

  double zero_probability(int n0, int m) const {
    switch (kind) {
      case Kind::Majority: return 2 * n0 >= m ? 1.0 : 0.0;
      case Kind::Threshold: return n0 >= threshold ? 1.0 : 0.0;
      case Kind::Unanimous:
        if (n0 == m) return 1.0;
        if (n0 == 0) return 0.0;
        switch (tie) {
          case TiePolicy::ZeroWins: return 1.0;
          case TiePolicy::OneWins: return 0.0;
          case TiePolicy::FairCoin: return 0.5;
        }
    }
    return 0.0;
  }

  bool deterministic() const { return kind != Kind::Unanimous || tie != TiePolicy::FairCoin; }
};

inline std::string to_string(const VotingRule& r) {
  switch (r.kind) {
    case VotingRule::Kind::Majority: return "majority";
    case VotingRule::Kind::Threshold: return "threshold:" + std::to_string(r.threshold);
    case VotingRule::Kind::Unanimous:
      switch (r.tie) {
        case TiePolicy::ZeroWins: return "unanimous:zero";
        case TiePolicy::OneWins: return "unanimous:one";
        case TiePolicy::FairCoin: return "unanimous";
      }
  }
  return "?";
}

/// "majority", "threshold:<t>", "unanimous", "unanimous:zero|one|coin".
inline VotingRule parse_voting_rule(const std::string& s) {
  if (s == "majority") return VotingRule::majority();
  if (s == "unanimous" || s == "unanimous:coin") return VotingRule::unanimous();
  if (s == "unanimous:zero") return VotingRule::unanimous(TiePolicy::ZeroWins);
  if (s == "unanimous:one") return VotingRule::unanimous(TiePolicy::OneWins);
  const std::string prefix = "threshold:";
  if (s.rfind(prefix, 0) == 0) {
    const std::string num = s.substr(prefix.size());
    std::size_t used = 0;
    int t = 0;
    try {
      t = std::stoi(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size()) throw Error(ErrorCode::ParseError, "bad threshold in rule '" + s + "'");
    return VotingRule::with_threshold(t);
  }
  throw Error(ErrorCode::ParseError, "unknown voting rule '" + s + "'");
}

}  // namespace macrobell
