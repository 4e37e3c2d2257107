#include "kakeya/cli.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kakeya/errors.hpp"

namespace kakeya::cli {

namespace {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::string ring = "fq";
  std::uint32_t ell = 2;
  std::string phi = "sawyer";
  std::string family = "kakeya";
  int q_dim = 1;
  int dmin = 2;
  int dmax = 10;
  int depth = 8;
  int coverage_depth = 6;
  int decompose_depth = 12;
  std::uint64_t budget_cells = kDefaultCellBudget;
  std::uint64_t budget_pairs = kDefaultPairBudget;
  std::string format = "csv";
  std::string output;
  std::string fixture;
  int threads = 1;
  bool timing = false;
  bool known_digits = false;
  std::vector<std::string> x;
  std::string w;
  int N = 1;
  int A = 0;
  int B = 0;
  int amax = -1;
  int bmax = -1;
  std::int64_t nmin = 1;
  std::int64_t nmax = 1000;
  std::uint32_t prime = 2;
  std::int64_t kmax = 10000;
  std::string alpha = "1/10";
};

class ValidationErrors {
 public:
  void require(bool ok, const std::string& message) {
    if (!ok) messages_.push_back(message);
  }
  template <typename F>
  void attempt(F&& f) {
    try {
      f();
    } catch (const KakeyaError& e) {
      messages_.push_back(e.what());
    }
  }
  void raise() const {
    if (messages_.empty()) return;
    std::string text = "invalid configuration:";
    for (const auto& m : messages_) text += "\n  - " + m;
    throw ParseError(text);
  }

 private:
  std::vector<std::string> messages_;
};

std::string seconds_text(double seconds, bool timing) {
  if (!timing) return "0.000";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", seconds);
  return buf;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

RingSpec ring_of(const RunConfig& cfg) { return RingSpec::make(cfg.ell, parse_ring_mode(cfg.ring)); }

// Digit strings name finite expansions; unless --known-digits is given they
// are zero-extended to the depth the computation needs.
Element parse_input(const std::string& text, const RingSpec& ring, int needed, bool known) {
  const Element e = parse_digit_string(text);
  if (!(e.ring() == ring)) {
    throw ParseError("input '" + text + "' is not over the configured ring " +
                     std::string(ring.tag()) + ":" + std::to_string(ring.ell()));
  }
  if (known || e.depth() >= needed) return e;
  return e.with_depth(needed);
}

void validate_common(const RunConfig& cfg, ValidationErrors& errors) {
  errors.require(cfg.ring == "fq" || cfg.ring == "zp", "--ring must be fq or zp, got '" + cfg.ring + "'");
  if (cfg.ring == "fq" || cfg.ring == "zp") errors.attempt([&] { ring_of(cfg); });
  errors.require(cfg.format == "csv" || cfg.format == "json",
                 "--format must be csv or json, got '" + cfg.format + "'");
  errors.require(cfg.threads >= 1, "--threads must be at least 1");
}

void validate_phi_family(const RunConfig& cfg, ValidationErrors& errors) {
  errors.require(cfg.phi == "sawyer" || cfg.phi == "dh", "--phi must be sawyer or dh, got '" + cfg.phi + "'");
  errors.require(cfg.family == "kakeya" || cfg.family == "nikodym",
                 "--family must be kakeya or nikodym, got '" + cfg.family + "'");
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns the rendered artifact.

std::string cmd_phi_eval(const RunConfig& cfg) {
  ValidationErrors errors;
  validate_common(cfg, errors);
  errors.require(!cfg.x.empty(), "--x is required (one digit string per component)");
  errors.require(cfg.depth >= 1, "--depth must be at least 1");
  errors.require(cfg.q_dim >= 1, "--q must be at least 1");
  errors.raise();
  const RingSpec ring = ring_of(cfg);
  const PhiConfig pc{ring, static_cast<int>(cfg.x.size()), cfg.q_dim};
  const SawyerPhi phi(pc);
  const int needed = phi.required_input_depth(cfg.depth);
  ElementVector x;
  for (const auto& text : cfg.x) x.push_back(parse_input(text, ring, needed, cfg.known_digits));
  const ElementVector y = phi.eval(x, cfg.depth);
  if (cfg.format == "json") {
    Json j;
    j["command"] = "phi-eval";
    j["depth"] = cfg.depth;
    j["input_depth"] = needed;
    j["phi"] = Json::array();
    for (const auto& e : y) j["phi"].push_back(to_digit_string(e));
    return j.dump(2) + "\n";
  }
  std::string text;
  for (const auto& e : y) text += to_digit_string(e) + "\n";
  return text;
}

std::string cmd_phi_dh_eval(const RunConfig& cfg) {
  ValidationErrors errors;
  validate_common(cfg, errors);
  errors.require(cfg.x.size() == 1, "--x must be given exactly once");
  errors.require(cfg.depth >= 1, "--depth must be at least 1");
  errors.raise();
  const RingSpec ring = ring_of(cfg);
  const Element a = parse_input(cfg.x.front(), ring, cfg.depth + 1, cfg.known_digits);
  const Element y = phi_dh_eval(a.reduce_to_R(), cfg.depth);
  if (cfg.format == "json") {
    Json j;
    j["command"] = "phi-dh-eval";
    j["depth"] = cfg.depth;
    j["experimental"] = ring.carries();
    j["phi"] = to_digit_string(y);
    return j.dump(2) + "\n";
  }
  return to_digit_string(y) + "\n";
}

MeasureOptions measure_options(const RunConfig& cfg) {
  MeasureOptions opts;
  opts.cell_budget = cfg.budget_cells;
  opts.pair_budget = cfg.budget_pairs;
  opts.threads = cfg.threads;
  return opts;
}

std::string cmd_measure(const RunConfig& cfg) {
  ValidationErrors errors;
  validate_common(cfg, errors);
  validate_phi_family(cfg, errors);
  errors.require(cfg.dmin >= 1, "--dmin must be at least 1");
  errors.require(cfg.dmin <= cfg.dmax, "--dmin must not exceed --dmax");
  errors.raise();
  const RingSpec ring = ring_of(cfg);
  const FamilyDescriptor fam = family_by_name(cfg.family, ring);
  const PhiMap phi(parse_phi_variant(cfg.phi), PhiConfig{ring, fam.p, fam.q});
  const DecayReport report = decay_report(fam, phi, cfg.dmin, cfg.dmax, measure_options(cfg));
  if (cfg.format == "json") {
    Json j;
    j["command"] = "measure";
    j["ring"] = cfg.ring;
    j["ell"] = cfg.ell;
    j["phi"] = cfg.phi;
    j["family"] = cfg.family;
    j["experimental"] = phi.variant() == PhiVariant::kDH && ring.carries();
    j["non_increasing"] = estimates_non_increasing(report);
    j["rows"] = Json::array();
    for (const auto& row : report.rows) {
      Json r;
      r["D"] = row.D;
      r["hit_cells"] = row.hit_cells;
      r["total_cells"] = row.total_cells;
      r["estimate_rational"] = to_fraction_string(row.estimate);
      r["estimate_decimal"] = to_decimal_string(row.estimate, 6);
      r["input_depth"] = row.input_depth;
      r["seconds"] = seconds_text(row.seconds, cfg.timing);
      j["rows"].push_back(r);
    }
    return j.dump(2) + "\n";
  }
  return render_decay_csv(report, cfg.timing);
}

std::string cmd_coverage(const RunConfig& cfg) {
  ValidationErrors errors;
  validate_common(cfg, errors);
  validate_phi_family(cfg, errors);
  errors.require(cfg.depth >= 1, "--depth must be at least 1");
  errors.raise();
  const RingSpec ring = ring_of(cfg);
  const FamilyDescriptor fam = family_by_name(cfg.family, ring);
  const PhiMap phi(parse_phi_variant(cfg.phi), PhiConfig{ring, fam.p, fam.q});
  const CoverageReport report = direction_coverage(fam, phi, cfg.depth, measure_options(cfg));
  if (cfg.format == "json") {
    Json j;
    j["command"] = "coverage";
    j["depth"] = report.D;
    j["directions"] = report.directions;
    j["w_cells"] = report.w_cells;
    j["missing"] = report.missing.size();
    j["missing_pairs"] = Json::array();
    for (const auto& m : report.missing) j["missing_pairs"].push_back({m.direction, m.w_cell});
    j["vertical"] = "excluded";
    return j.dump(2) + "\n";
  }
  std::ostringstream text;
  text << "depth:" << report.D << "\n"
       << "directions:" << report.directions << "\n"
       << "w_cells:" << report.w_cells << "\n"
       << "missing:" << report.missing.size() << "\n";
  for (const auto& m : report.missing) text << "missing_pair:" << m.direction << "," << m.w_cell << "\n";
  text << "vertical:excluded\n";
  return text.str();
}

std::string cmd_certify(const RunConfig& cfg) {
  ValidationErrors errors;
  validate_common(cfg, errors);
  errors.require(cfg.A >= 0 && cfg.B >= 0, "--A and --B must be non-negative");
  errors.require(cfg.nmin >= 1 && cfg.nmin <= cfg.nmax, "--nmin and --nmax must satisfy 1 <= nmin <= nmax");
  errors.require(cfg.amax < 0 || cfg.amax >= cfg.A, "--amax must not be below --A");
  errors.require(cfg.bmax < 0 || cfg.bmax >= cfg.B, "--bmax must not be below --B");
  errors.raise();
  const int a_hi = cfg.amax < 0 ? cfg.A : cfg.amax;
  const int b_hi = cfg.bmax < 0 ? cfg.B : cfg.bmax;
  std::vector<CertificateReport> reports;
  for (int A = cfg.A; A <= a_hi; ++A) {
    for (int B = cfg.B; B <= b_hi; ++B) {
      reports.push_back(certify_lemma_bounds(A, B, cfg.nmin, cfg.nmax, cfg.ell));
    }
  }
  if (cfg.format == "json") {
    Json j;
    j["command"] = "certify";
    j["ell"] = cfg.ell;
    j["nmin"] = cfg.nmin;
    j["nmax"] = cfg.nmax;
    j["reports"] = Json::array();
    for (const auto& rep : reports) {
      Json r;
      r["A"] = rep.A;
      r["B"] = rep.B;
      r["lemmas"] = Json::array();
      for (std::size_t i = 0; i < rep.lemmas.size(); ++i) {
        const auto& s = rep.lemmas[i];
        Json l;
        l["lemma"] = std::string(lemma_name(s.lemma));
        l["minimal_N"] = s.minimal_N ? Json(*s.minimal_N) : Json(nullptr);
        l["monotone"] = s.monotone;
        l["implication_failures"] = s.implication_failures;
        l["inequality"] = rep.rows[i].inequality;
        r["lemmas"].push_back(l);
      }
      j["reports"].push_back(r);
    }
    return j.dump(2) + "\n";
  }
  return render_certificates_csv(reports);
}

std::string cmd_diff_example(const RunConfig& cfg) {
  ValidationErrors errors;
  validate_common(cfg, errors);
  errors.attempt([&] { RingSpec::make(cfg.prime, RingMode::kPadic); });
  errors.require(cfg.kmax >= 2, "--kmax must be at least 2");
  std::optional<Rational> alpha;
  errors.attempt([&] { alpha = parse_rational(cfg.alpha); });
  errors.require(!alpha || *alpha > 0, "--alpha must be positive");
  errors.raise();
  const DefectReport report = example_defect_scan(cfg.prime, cfg.kmax, *alpha);
  if (cfg.format == "json") {
    Json j;
    j["command"] = "diff-example";
    j["p"] = cfg.prime;
    j["alpha"] = to_fraction_string(*alpha);
    const auto crossover = negative_margin_crossover(report);
    j["crossover"] = crossover ? Json(*crossover) : Json(nullptr);
    j["rows"] = Json::array();
    for (const auto& row : report.rows) {
      Json r;
      r["scale"] = row.scale;
      r["defect_valuation"] = row.defect_valuation;
      r["strict_quotient"] = row.defect_valuation - row.scale;
      r["margin"] = to_fraction_string(*row.margin);
      r["margin_decimal"] = to_decimal_string(*row.margin, 6);
      j["rows"].push_back(r);
    }
    return j.dump(2) + "\n";
  }
  return render_defects_csv(report);
}

std::string cmd_decompose(const RunConfig& cfg) {
  ValidationErrors errors;
  validate_common(cfg, errors);
  validate_phi_family(cfg, errors);
  errors.require(cfg.phi == "sawyer", "decompose needs --phi sawyer (the expansion in r_k p_k)");
  errors.require(cfg.x.size() == 1, "--x must be given exactly once");
  errors.require(!cfg.w.empty(), "--w is required");
  errors.require(cfg.N >= 1, "--N must be at least 1");
  errors.require(cfg.depth >= 1, "--depth must be at least 1");
  errors.raise();
  const RingSpec ring = ring_of(cfg);
  const FamilyDescriptor fam = family_by_name(cfg.family, ring);
  const SawyerPhi phi(PhiConfig{ring, fam.p, fam.q});
  const int needed = decomposition_input_depth(phi, cfg.N, cfg.depth);
  const ElementVector x{parse_input(cfg.x.front(), ring, needed, cfg.known_digits)};
  const ElementVector w{parse_input(cfg.w, ring, cfg.depth, cfg.known_digits)};
  const TermDecomposition t = term_decomposition(fam, phi, x, w, cfg.N, cfg.depth);
  static const char* const kNames[] = {"I", "II", "III", "IV", "V", "VI"};
  const bool holds = t.sum() == t.value;
  if (cfg.format == "json") {
    Json j;
    j["command"] = "decompose";
    j["N"] = cfg.N;
    j["depth"] = cfg.depth;
    for (std::size_t i = 0; i < 6; ++i) j["terms"][kNames[i]] = to_digit_string(t.terms[i][0]);
    j["value"] = to_digit_string(t.value[0]);
    j["sum"] = to_digit_string(t.sum()[0]);
    j["identity"] = holds;
    return j.dump(2) + "\n";
  }
  std::string text;
  for (std::size_t i = 0; i < 6; ++i) text += std::string(kNames[i]) + ":" + to_digit_string(t.terms[i][0]) + "\n";
  text += "value:" + to_digit_string(t.value[0]) + "\n";
  text += "sum:" + to_digit_string(t.sum()[0]) + "\n";
  text += std::string("identity:") + (holds ? "holds" : "fails") + "\n";
  return text;
}

// ---------------------------------------------------------------------------

void write_atomically(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ParseError("cannot write " + tmp.string());
    f << text;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ParseError("cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ParseError("cannot move output into place at " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot read " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

std::size_t first_difference_line(const std::string& a, const std::string& b) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] != b[i]) return line;
    if (a[i] == '\n') ++line;
  }
  return line;
}

// key=value lines; blank lines and lines starting with '#' are ignored.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(number) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

// Splices config-file entries in as long options, skipping keys that the
// command line already sets (flags take precedence over the file).
std::vector<std::string> apply_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ParseError("--config needs a path");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;
  const auto given = [&rest](const std::string& key) {
    for (const auto& a : rest) {
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    }
    return false;
  };
  std::vector<std::string> extra;
  for (const auto& [key, value] : read_config(config_path)) {
    if (given(key)) continue;
    if (value == "true" || value == "false") {
      if (value == "true") extra.push_back("--" + key);
    } else {
      extra.push_back("--" + key + "=" + value);
    }
  }
  if (rest.empty()) return extra;
  // entries go right after the subcommand name
  std::vector<std::string> out{rest.front()};
  out.insert(out.end(), extra.begin(), extra.end());
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--ring", cfg.ring, "Ring mode: fq (power series) or zp (p-adic)");
  sub->add_option("--ell", cfg.ell, "Residue field size (a prime)");
  sub->add_option("--format", cfg.format, "Output format: csv or json");
  sub->add_option("--output", cfg.output, "Write output to this file (atomically)");
  sub->add_option("--fixture", cfg.fixture, "Compare output byte-for-byte with this file");
  sub->add_option("--threads", cfg.threads, "Worker threads");
  sub->add_flag("--timing", cfg.timing, "Report wall-clock seconds");
  // consumed before parsing; declared for --help
  sub->add_option("--config", "key=value configuration file (flags take precedence)");
}

}  // namespace

std::string render_decay_csv(const DecayReport& report, bool timing) {
  std::string text = "D,hit_cells,total_cells,estimate_rational,estimate_decimal,input_depth,seconds\n";
  for (const auto& row : report.rows) {
    text += std::to_string(row.D) + "," + std::to_string(row.hit_cells) + "," +
            std::to_string(row.total_cells) + "," + to_fraction_string(row.estimate) + "," +
            to_decimal_string(row.estimate, 6) + "," + std::to_string(row.input_depth) + "," +
            seconds_text(row.seconds, timing) + "\n";
  }
  return text;
}

std::string render_certificates_csv(const std::vector<CertificateReport>& reports) {
  std::string text = "lemma,A,B,N,holds,inequality\n";
  for (const auto& rep : reports) {
    for (const auto& row : rep.rows) {
      text += std::string(lemma_name(row.lemma)) + "," + std::to_string(row.A) + "," +
              std::to_string(row.B) + "," + std::to_string(row.N) + "," + bool_text(row.holds) +
              "," + row.inequality + "\n";
    }
  }
  return text;
}

std::string render_defects_csv(const DefectReport& report) {
  std::string text = "scale,strict_quotient,very_strong_quotient\n";
  for (const auto& row : report.rows) {
    const bool infinite = row.defect_valuation == kInfiniteValuation;
    text += std::to_string(row.scale) + "," +
            (infinite ? "inf" : std::to_string(row.defect_valuation - row.scale)) + "," +
            (row.margin ? to_fraction_string(*row.margin) : "inf") + "\n";
  }
  return text;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Finite-depth Kakeya set experiments over Z_l and F_l[[t]]",
               "kakeya"};
  app.require_subcommand(1);

  auto* phi_eval = app.add_subcommand("phi-eval", "Evaluate the universal function phi");
  add_common(phi_eval, cfg);
  phi_eval->add_option("--x", cfg.x, "Input component as a digit string (repeat for p > 1)");
  phi_eval->add_option("--q", cfg.q_dim, "Output dimension q");
  phi_eval->add_option("--depth", cfg.depth, "Output depth");
  phi_eval->add_flag("--known-digits", cfg.known_digits, "Treat the input's digits as all that is known");

  auto* phi_dh = app.add_subcommand("phi-dh-eval", "Evaluate the digit-shift map");
  add_common(phi_dh, cfg);
  phi_dh->add_option("--x", cfg.x, "Input as a digit string");
  phi_dh->add_option("--depth", cfg.depth, "Output depth");
  phi_dh->add_flag("--known-digits", cfg.known_digits, "Treat the input's digits as all that is known");

  auto* measure = app.add_subcommand("measure", "Covering-estimate decay table");
  add_common(measure, cfg);
  measure->add_option("--phi", cfg.phi, "sawyer or dh");
  measure->add_option("--family", cfg.family, "kakeya or nikodym");
  measure->add_option("--dmin", cfg.dmin, "Smallest depth");
  measure->add_option("--dmax", cfg.dmax, "Largest depth");
  measure->add_option("--budget-cells", cfg.budget_cells, "Cell budget")->envname("KAKEYA_BUDGET_CELLS");
  measure->add_option("--budget-pairs", cfg.budget_pairs, "Enumerated (x, w) pair budget");

  auto* coverage = app.add_subcommand("coverage", "Direction-coverage audit");
  add_common(coverage, cfg);
  coverage->add_option("--phi", cfg.phi, "sawyer or dh");
  coverage->add_option("--family", cfg.family, "kakeya or nikodym");
  coverage->add_option("--depth", cfg.coverage_depth, "Depth");
  coverage->add_option("--budget-cells", cfg.budget_cells, "Cell budget")->envname("KAKEYA_BUDGET_CELLS");
  coverage->add_option("--budget-pairs", cfg.budget_pairs, "Enumerated (x, w) pair budget");

  auto* certify = app.add_subcommand("certify", "Minimal N for the integer bounds on terms I-V");
  add_common(certify, cfg);
  certify->add_option("--A", cfg.A, "A (or the first A of a grid)");
  certify->add_option("--B", cfg.B, "B (or the first B of a grid)");
  certify->add_option("--amax", cfg.amax, "Last A of a grid");
  certify->add_option("--bmax", cfg.bmax, "Last B of a grid");
  certify->add_option("--nmin", cfg.nmin, "First N scanned");
  certify->add_option("--nmax", cfg.nmax, "Last N scanned");

  auto* diff = app.add_subcommand("diff-example", "Defect scan of the valuation-jump example");
  add_common(diff, cfg);
  diff->add_option("--p", cfg.prime, "Prime");
  diff->add_option("--kmax", cfg.kmax, "Largest scale");
  diff->add_option("--alpha", cfg.alpha, "Very strong exponent, e.g. 1/10 or 0.1");

  auto* decompose = app.add_subcommand("decompose", "Six-term decomposition of f(x, phi(x), w)");
  add_common(decompose, cfg);
  decompose->add_option("--phi", cfg.phi, "sawyer");
  decompose->add_option("--family", cfg.family, "kakeya or nikodym");
  decompose->add_option("--x", cfg.x, "x as a digit string");
  decompose->add_option("--w", cfg.w, "w as a digit string");
  decompose->add_option("--N", cfg.N, "Split index N");
  decompose->add_option("--depth", cfg.decompose_depth, "Output depth");
  decompose->add_flag("--known-digits", cfg.known_digits, "Treat the inputs' digits as all that is known");

  try {
    std::vector<std::string> argv = apply_config(args);
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);

    std::string text;
    if (phi_eval->parsed()) text = cmd_phi_eval(cfg);
    else if (phi_dh->parsed()) text = cmd_phi_dh_eval(cfg);
    else if (measure->parsed()) text = cmd_measure(cfg);
    else if (coverage->parsed()) {
      cfg.depth = cfg.coverage_depth;
      text = cmd_coverage(cfg);
    }
    else if (certify->parsed()) text = cmd_certify(cfg);
    else if (diff->parsed()) text = cmd_diff_example(cfg);
    else {
      cfg.depth = cfg.decompose_depth;
      text = cmd_decompose(cfg);
    }

    if (cfg.output.empty()) {
      out << text;
    } else {
      write_atomically(cfg.output, text);
    }
    if (!cfg.fixture.empty()) {
      const std::string expected = read_file(cfg.fixture);
      if (expected != text) {
        err << "fixture mismatch: " << cfg.fixture << " differs at line "
            << first_difference_line(expected, text) << "\n";
        return kExitFixture;
      }
    }
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const InsufficientDepth& e) {
    err << "insufficient depth: required " << e.required() << ", available " << e.available()
        << " (" << e.what() << ")\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace kakeya::cli
