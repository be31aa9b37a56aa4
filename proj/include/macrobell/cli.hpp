#pragma once

// Command-line driver. `run` is the whole program minus process plumbing, so
// tests can exercise it with string streams.
//
// Exit codes: 0 success, 2 validation failure, 3 usage error, 4 file error,
// 5 computation error.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "macrobell/box.hpp"
#include "macrobell/classify.hpp"
#include "macrobell/closed_form.hpp"
#include "macrobell/error.hpp"
#include "macrobell/ic.hpp"
#include "macrobell/io.hpp"
#include "macrobell/macro.hpp"
#include "macrobell/montecarlo.hpp"
#include "macrobell/polytope.hpp"
#include "macrobell/voting.hpp"

namespace macrobell::cli {

enum ExitCode : int { kOk = 0, kInvalid = 2, kUsage = 3, kFile = 4, kCompute = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidBox : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string box;
  std::string m;
  std::string rule = "majority";
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  int figure_id = 0;
};

using io::Json;

// ---------------------------------------------------------------------------
// Argument parsing helpers

inline double parse_real(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw UsageError("bad number '" + s + "' for " + what);
  return v;
}

inline int parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw UsageError("bad integer '" + s + "' for " + what);
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

/// "M" or "start:end:step".
inline std::vector<int> parse_m(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() == 1) {
    const int m = parse_int(parts[0], "--M");
    if (m < 1) throw UsageError("--M must be >= 1");
    return {m};
  }
  if (parts.size() != 3) throw UsageError("--M takes M or start:end:step");
  const int start = parse_int(parts[0], "--M start"), end = parse_int(parts[1], "--M end"),
            step = parse_int(parts[2], "--M step");
  if (start < 1 || step < 1 || end < start) throw UsageError("--M range needs 1 <= start <= end and step >= 1");
  return m_range(start, end, step);
}

inline VotingRule parse_rule(const std::string& s) {
  try {
    return parse_voting_rule(s);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

// class:I:p=0.8, class:III:p1=0.5,p2=0.4,p3=0.1 or class:III:0.5,0.4,0.1
inline Box class_box_from(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw UsageError("class source is class:<I..V>:<weights>");
  const auto id = parse_class_id(parts[1]);
  if (!id) throw UsageError("unknown class '" + parts[1] + "'");
  std::vector<double> w;
  for (const auto& item : split(parts[2], ',')) {
    const auto eq = item.find('=');
    w.push_back(parse_real(eq == std::string::npos ? item : item.substr(eq + 1), "class weight"));
  }
  try {
    return class_generator(*id, w, false).box;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

/// iso:p=0.7 is p PR + (1-p) uniform.
inline Box iso_box_from(const std::string& spec) {
  const std::string arg = spec.substr(4);
  const auto eq = arg.find('=');
  const double p = parse_real(eq == std::string::npos ? arg : arg.substr(eq + 1), "iso weight");
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("iso weight must lie in [0,1]");
  return mix({{{p, pr_box()}, {1.0 - p, uniform_box()}}});
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Builtin name or path to a box JSON file. Returns the raw table so that
/// `validate` can report on invalid files.
inline Table load_table(const std::string& source) {
  if (source.empty()) throw UsageError("--box is required");
  if (auto v = vertex_by_id(source)) return v->table();
  std::string upper = source;
  if (!upper.empty()) upper[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(upper[0])));
  if (upper.size() > 1 && upper[0] == 'P') upper[1] = static_cast<char>(std::toupper(static_cast<unsigned char>(upper[1])));
  if (auto v = vertex_by_id(upper)) return v->table();
  if (source.rfind("class:", 0) == 0) return class_box_from(source).table();
  if (source.rfind("iso:", 0) == 0) return iso_box_from(source).table();
  const std::string text = read_file(source);
  try {
    return io::parse_table(text);
  } catch (const Error& e) {
    throw InvalidBox(source + ": " + e.what());
  }
}

inline Box load_box(const std::string& source) {
  const Table t = load_table(source);
  try {
    return make_box(t);
  } catch (const Error& e) {
    throw InvalidBox(source + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Output

/// Rows of mixed strings and numbers, emitted as CSV or a JSON array of objects.
struct Records {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

inline std::string csv_cell(const Json& v) {
  if (v.is_number_float()) return io::fmt(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline void emit(std::ostream& os, const Records& r, const std::string& format) {
  if (format == "json") {
    Json arr = Json::array();
    for (const auto& row : r.rows) {
      Json obj = Json::object();
      for (std::size_t i = 0; i < r.columns.size(); ++i) obj[r.columns[i]] = row[i];
      arr.push_back(obj);
    }
    os << arr.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
  os << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
}

inline void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, Json>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else {
    out.emplace_back(prefix, j);
  }
}

/// Reports print as JSON, or as key,value CSV lines with dotted keys.
inline void emit(std::ostream& os, const Json& report, const std::string& format) {
  if (format == "csv") {
    std::vector<std::pair<std::string, Json>> flat;
    flatten(report, "", flat);
    os << "key,value\n";
    for (const auto& [k, v] : flat) os << k << ',' << csv_cell(v) << '\n';
    return;
  }
  os << report.dump(2) << '\n';
}

inline Json chsh_json(const ChshReport& r) {
  Json j;
  j["canonical"] = r.canonical_value;
  j["max_violation"] = r.max_violation;
  j["max_facet"] = r.max_facet;
  j["symmetrized"] = r.symmetrized_values;
  j["A"] = r.a_coefficients;
  j["E"] = r.correlators;
  return j;
}

inline Json ic_json(const IcReport& r) {
  Json j;
  j["Q1"] = r.q1;
  j["Q2"] = r.q2;
  j["E1"] = r.e1;
  j["E2"] = r.e2;
  j["lhs"] = r.lhs;
  j["satisfied"] = r.satisfied;
  j["lhs_relabel_max"] = r.lhs_relabel_max;
  return j;
}

inline Json verdict_json(const MembershipVerdict& v) {
  Json j;
  j["in_set"] = v.in_set;
  j["tolerance"] = v.tolerance_used;
  if (v.certificate) j["certificate"] = io::certificate_to_json(*v.certificate);
  if (!v.detail.empty()) j["detail"] = v.detail;
  return j;
}

inline Records trace_records(const std::vector<TracePoint>& trace) {
  Records r{{"M", "I_chsh", "A00", "A01", "A10", "A11"}, {}};
  for (const auto& p : trace) r.rows.push_back({p.m, p.chsh, p.a[0], p.a[1], p.a[2], p.a[3]});
  return r;
}

struct FigureSeries {
  std::string label;
  int case_id;
  CaseParams params;
};

inline std::vector<FigureSeries> figure_series(int id) {
  std::vector<FigureSeries> s;
  char label[64];
  switch (id) {
    case 1:
      for (double b : {0.5, 0.4, 0.8}) {
        std::snprintf(label, sizeof label, "beta=%g", b);
        s.push_back({label, 2, {0.0, b, 1.0 - b, 0.0}});
      }
      break;
    case 2:
      for (double a : {0.4, 0.5, 0.6}) {
        std::snprintf(label, sizeof label, "alpha=%g", a);
        s.push_back({label, 3, {a, (1.0 - a) / 2, (1.0 - a) / 2, 0.0}});
      }
      break;
    case 3:
      for (double g : {0.6, 0.5, 0.4}) {
        std::snprintf(label, sizeof label, "gamma=%g", g);
        s.push_back({label, 4, {0.0, (1.0 - g) / 2, (1.0 - g) / 2, g}});
      }
      break;
    case 4:
      for (double a : {0.2, 0.25, 0.3}) {
        std::snprintf(label, sizeof label, "alpha=gamma=%g", a);
        s.push_back({label, 5, {a, 0.0, 1.0 - 2 * a, a}});
      }
      break;
    case 5:
      for (double a : {0.2, 0.25, 0.3}) {
        std::snprintf(label, sizeof label, "alpha=gamma=%g", a);
        s.push_back({label, 7, {a, (1.0 - 2 * a) / 2, (1.0 - 2 * a) / 2, a}});
      }
      break;
    default: throw UsageError("--id must be 1..6");
  }
  return s;
}

inline Records figure_records(int id, const std::vector<int>& ms) {
  Records r{{"M", "series", "A", "A_closed_form", "A_as_printed"}, {}};
  for (const auto& series : figure_series(id))
    for (int m : ms)
      r.rows.push_back({m, series.label, enumerated_a(series.params, m),
                        closed_form_case(series.case_id, series.params, m),
                        closed_form_as_printed(series.case_id, series.params, m)});
  return r;
}

// ---------------------------------------------------------------------------
// Commands

inline int dispatch(const RunConfig& cfg, std::ostream& out) {
  const auto fmt_or = [&](const char* dflt) { return cfg.format.empty() ? std::string(dflt) : cfg.format; };
  const VotingRule rule = parse_rule(cfg.rule);

  if (cfg.command == "validate") {
    const Table t = load_table(cfg.box);
    const TableCheck c = check_table(t);
    Json j;
    j["valid"] = c.ok(kProbTol);
    j["worst_negative"] = c.worst_negative;
    j["worst_row_error"] = c.worst_row_error;
    j["worst_marginal"] = c.worst_marginal;
    try {
      make_box(t);
    } catch (const Error& e) {
      j["error"] = std::string(to_string(e.code()));
      j["detail"] = e.what();
    }
    emit(out, j, fmt_or("json"));
    return c.ok(kProbTol) ? kOk : kInvalid;
  }
  if (cfg.command == "figure") {
    if (cfg.figure_id == 6) {
      Records r{{"p1", "y", "F"}, {}};
      for (const auto& c : fig6_grid()) r.rows.push_back({c.p1, c.y, c.f});
      emit(out, r, fmt_or("csv"));
      return kOk;
    }
    const std::vector<int> ms = cfg.m.empty() ? m_range(2, 100, 2) : parse_m(cfg.m);
    emit(out, figure_records(cfg.figure_id, ms), fmt_or("csv"));
    return kOk;
  }

  const Box box = load_box(cfg.box);
  if (cfg.command == "chsh") {
    emit(out, chsh_json(chsh(box)), fmt_or("json"));
  } else if (cfg.command == "membership") {
    Json j;
    j["no_signaling"] = verdict_json(is_no_signaling(box.table()));
    j["local"] = verdict_json(is_local(box));
    j["tsirelson"] = tsirelson_check(box);
    emit(out, j, fmt_or("json"));
  } else if (cfg.command == "macro") {
    if (cfg.m.empty()) throw UsageError("macro needs --M");
    const auto ms = parse_m(cfg.m);
    if (ms.size() != 1) throw UsageError("macro takes a single --M");
    const MacroBox mb = macro_box(box, ms[0], rule);
    if (fmt_or("json") == "json")
      out << io::box_to_json(mb.box) << '\n';
    else
      emit(out, trace_records({trace_point(mb)}), "csv");
  } else if (cfg.command == "trace") {
    const auto ms = parse_m(cfg.m.empty() ? "2:200:2" : cfg.m);
    emit(out, trace_records(macro_chsh_trace(box, ms, rule)), fmt_or("csv"));
  } else if (cfg.command == "mc") {
    if (cfg.m.empty()) throw UsageError("mc needs --M");
    if (cfg.trials < 1) throw UsageError("--trials must be >= 1");
    Records r{{"M", "I_chsh", "A00", "A01", "A10", "A11", "stderr_I_chsh", "stderr_A00", "stderr_A01", "stderr_A10",
               "stderr_A11"},
              {}};
    for (int m : parse_m(cfg.m)) {
      const McEstimate est = sample_macro(box, m, rule, cfg.trials, cfg.seed);
      const ChshReport c = chsh_table(est.table());
      const McChsh mc = mc_chsh(est);
      const double n = static_cast<double>(cfg.trials);
      std::vector<Json> row{m, c.max_violation};
      for (double a : c.a_coefficients) row.emplace_back(a);
      row.emplace_back(mc.standard_error);
      for (double a : c.a_coefficients) row.emplace_back(std::sqrt(a * (1.0 - a) / n));
      r.rows.push_back(std::move(row));
    }
    emit(out, r, fmt_or("csv"));
  } else if (cfg.command == "ic") {
    emit(out, ic_json(ic_necessary(box)), fmt_or("json"));
  } else if (cfg.command == "classify") {
    ClassifyOptions opt;
    opt.rule = rule;
    if (!cfg.m.empty()) opt.ms = parse_m(cfg.m);
    const ClassificationReport rep = classify(box, opt);
    Json j;
    j["no_signaling"] = rep.no_signaling.in_set;
    j["local"] = rep.local->in_set;
    j["violation"] = std::max(0.0, rep.chsh.max_violation - 2.0);
    j["facet"] = rep.chsh.max_facet;
    j["chsh"] = rep.chsh.max_violation;
    j["tsirelson"] = rep.tsirelson;
    j["ic_necessary"] = rep.ic.satisfied;
    j["ic_lhs"] = rep.ic.lhs;
    j["limit"] = to_string(rep.limit->label);
    j["limit_final_value"] = rep.limit->final_value;
    emit(out, j, fmt_or("json"));
  } else {
    throw UsageError("unknown command '" + cfg.command + "'");
  }
  return kOk;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Macroscopic coarse-graining of 2-2-2 no-signaling boxes", "macrobell"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub, bool needs_box) {
    auto* b = sub->add_option("--box", cfg.box, "builtin name (pr, uniform, d1_0..d4_1, L<bits>, PR_f, "
                                                 "class:<id>:<weights>, iso:p=<p>) or JSON file");
    if (needs_box) b->required();
    sub->add_option("--M", cfg.m, "M or start:end:step");
    sub->add_option("--rule", cfg.rule, "majority | threshold:t | unanimous[:zero|one|coin]");
    sub->add_option("--trials", cfg.trials, "Monte Carlo experiments per setting");
    sub->add_option("--seed", cfg.seed, "Monte Carlo seed");
    sub->add_option("--out", cfg.out, "output file (default stdout)");
    sub->add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  };
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"validate", "check a box table"},
      {"chsh", "CHSH values over all eight facets"},
      {"membership", "no-signaling and local polytope membership with certificates"},
      {"macro", "macroscopic box for a single M"},
      {"trace", "macroscopic CHSH over a range of M"},
      {"mc", "sampled macroscopic CHSH with standard errors"},
      {"ic", "information-causality necessary test"},
      {"classify", "NS, locality, Tsirelson, IC and macroscopic-limit label"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), true);
  auto* fig = app.add_subcommand("figure", "figure data as CSV");
  add_common(fig, false);
  fig->add_option("--id", cfg.figure_id, "1..6")->required()->check(CLI::Range(1, 6));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    if (cfg.out.empty()) return dispatch(cfg, out);
    std::ostringstream buf;
    const int code = dispatch(cfg, buf);
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file || !(file << buf.str())) throw FileError("cannot write '" + cfg.out + "'");
    return code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const FileError& e) {
    err << "file error: " << e.what() << '\n';
    return kFile;
  } catch (const InvalidBox& e) {
    err << "invalid box: " << e.what() << '\n';
    return kInvalid;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kCompute;
  }
}

}  // namespace macrobell::cli
