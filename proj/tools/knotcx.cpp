// Command line front end: cohomology tables, cocycle checks, chord algebra
// dimensions, linking numbers, pairings and covering checks.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "knotcx/chord.hpp"
#include "knotcx/cohomology.hpp"
#include "knotcx/integrator.hpp"

using namespace knotcx;
using nlohmann::json;

namespace {

constexpr const char* kSchema = "v1";

// Raised for bad flag values found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { Text, Json, Csv };

struct Globals {
  Format format = Format::Text;
  bool json_flag = false;
  unsigned threads = 0;
  std::string cache_dir;
};

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("GC_CACHE_DIR"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return std::filesystem::path(xdg) / "knotcx";
  if (const char* home = std::getenv("HOME"); home && *home) return std::filesystem::path(home) / ".cache" / "knotcx";
  return std::filesystem::temp_directory_path() / "knotcx-cache";
}

std::filesystem::path cache_dir(const Globals& g) {
  return g.cache_dir.empty() ? default_cache_dir() : std::filesystem::path(g.cache_dir);
}

std::string scalar_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

// Emits `out` in the selected format. `rows` names an array member printed
// as a table in text and CSV mode.
void emit(const Globals& g, json out, const std::string& rows = "") {
  out["schema"] = kSchema;
  if (g.format == Format::Json) {
    std::cout << out.dump(2) << "\n";
    return;
  }
  const json* table = rows.empty() || !out.contains(rows) ? nullptr : &out[rows];
  if (g.format == Format::Csv) {
    if (table && !table->empty() && (*table)[0].is_object()) {
      std::string sep;
      for (const auto& [key, v] : (*table)[0].items()) {
        std::cout << sep << key;
        sep = ",";
      }
      std::cout << "\n";
      for (const auto& row : *table) {
        sep.clear();
        for (const auto& [key, v] : row.items()) {
          const std::string s = scalar_text(v);
          std::cout << sep << (s.find(',') != std::string::npos ? "\"" + s + "\"" : s);
          sep = ",";
        }
        std::cout << "\n";
      }
      return;
    }
    std::cout << "key,value\n";
    for (const auto& [key, v] : out.items()) {
      const std::string s = scalar_text(v);
      std::cout << key << "," << (s.find(',') != std::string::npos ? "\"" + s + "\"" : s) << "\n";
    }
    return;
  }
  for (const auto& [key, v] : out.items()) {
    if (key == "schema" || (table && key == rows)) continue;
    std::cout << key << ": " << scalar_text(v) << "\n";
  }
  if (table) {
    for (const auto& row : *table) {
      if (!row.is_object()) {
        std::cout << scalar_text(row) << "\n";
        continue;
      }
      std::string sep;
      for (const auto& [key, v] : row.items()) {
        std::cout << sep << key << "=" << scalar_text(v);
        sep = "  ";
      }
      std::cout << "\n";
    }
  }
}

void progress(const std::string& msg) { std::cerr << "[knotcx] " << msg << std::endl; }

Complex make_complex(const Globals& g) {
  Complex::Options opt;
  opt.threads = g.threads;
  opt.cache_dir = cache_dir(g);
  return Complex(opt);
}

json report_json(const BettiReport& r) {
  return {{"k", r.k}, {"l", r.l}, {"dim", r.dim}, {"rank_out", r.rank_out}, {"rank_in", r.rank_in}, {"betti", r.betti}};
}

json terms_json(const GraphVector& v) { return vector_to_json(v); }

GraphVector read_cochain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open cochain file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("cochain file '" + path + "' is not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("cochain")) j = j["cochain"];
  return vector_from_json(j);
}

std::array<double, 2> parse_pair(const std::string& text, const std::string& what) {
  std::array<double, 2> out{};
  std::stringstream ss(text);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= 2) throw UsageError(what + " takes two comma-separated values");
    try {
      std::size_t used = 0;
      out[i] = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + item + "' in " + what);
    }
    ++i;
  }
  if (i == 1) out[1] = out[0];
  if (i == 0) throw UsageError(what + " is empty");
  return out;
}

// Error JSON on stderr; returns the exit code.
int fail(int code, const std::string& kind, const std::string& message, json extra = json::object()) {
  json err{{"schema", kSchema}, {"error", {{"kind", kind}, {"message", message}}}};
  for (auto& [k, v] : extra.items()) err["error"][k] = v;
  std::cerr << err.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph complex cohomology, chord diagrams and configuration space integrals for long knots"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::string format = "text";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_flag("--json", g.json_flag, "Same as --format json");
  app.add_option("--threads", g.threads, "Worker threads (0: all logical cores)");
  app.add_option("--cache-dir", g.cache_dir, "Cache directory (default $GC_CACHE_DIR)");

  int k = 0, l = 0;
  std::optional<int> deg;
  bool table = false, no_1t = false;
  std::string graph_text, file;

  auto* basis = app.add_subcommand("basis", "Canonical basis of D^{k,l}");
  basis->add_option("--ord", k, "Order k")->required();
  basis->add_option("--deg", l, "Degree l")->required();

  auto* betti = app.add_subcommand("betti", "Dimension of H^{k,l}");
  betti->add_option("--ord", k, "Order k")->required();
  betti->add_option("--deg", deg, "Degree l (all degrees when omitted)");
  betti->add_flag("--table", table, "Print the whole row of degrees");

  auto* delta_cmd = app.add_subcommand("delta", "Differential of one graph");
  delta_cmd->add_option("--graph", graph_text, "Graph in text form, e.g. \"G[4,0;E{1>3,2>4}]\"")->required();

  auto* cocycle = app.add_subcommand("cocycle-check", "Is a cochain file closed under delta");
  cocycle->add_option("--file", file, "Cochain JSON [{\"coeff\":\"p/q\",\"graph\":\"G[...]\"}]")->required();

  auto* euler = app.add_subcommand("euler", "Euler characteristic of D^{k,*}");
  euler->add_option("--ord", k, "Order k")->required();

  auto* chord = app.add_subcommand("chord-dim", "Dimension of chord diagrams modulo 4T (and 1T)");
  chord->add_option("--order", k, "Number of chords")->required();
  chord->add_flag("--no-1t", no_1t, "Drop the one-term relation");

  std::string preset = "s1-vs-i1";
  int n = 5;
  std::uint64_t samples = 1000000, seed = 1;
  double tolerance = 0.05;
  auto* link = app.add_subcommand("link", "Monte-Carlo linking number");
  link->add_option("--preset", preset, "s1-vs-i1 | hopf | unlinked")
      ->check(CLI::IsMember({"s1-vs-i1", "hopf", "unlinked"}));
  link->add_option("--n", n, "Ambient dimension");
  link->add_option("--samples", samples, "Sample count")->check(CLI::PositiveNumber);
  link->add_option("--seed", seed, "RNG seed");
  link->add_option("--tolerance", tolerance, "Standard error above which the estimate is flagged");

  std::string cycle = "alpha", eps_text = "0.05,0.05", delta_text, job;
  double complement_fraction = 0.1, box = 2.0;
  bool direct = false;
  auto* pair = app.add_subcommand("pair", "Pairing of a cochain with a cycle");
  pair->add_option("--cochain", file, "Cochain JSON file");
  pair->add_option("--job", job, "Job JSON {cochain, cycle, n, samples, seed, eps, strata}");
  pair->add_option("--cycle", cycle, "alpha | lambda")->check(CLI::IsMember({"alpha", "lambda"}));
  pair->add_option("--n", n, "Ambient dimension (odd, >= 5)");
  pair->add_option("--samples", samples, "Total sample count")->check(CLI::PositiveNumber);
  pair->add_option("--seed", seed, "RNG seed");
  pair->add_option("--eps", eps_text, "Bump widths eps_1,eps_2");
  pair->add_option("--delta", delta_text, "Bump heights delta_1,delta_2 (default eps^2)");
  pair->add_option("--complement-fraction", complement_fraction, "Share of samples outside the localized stratum");
  pair->add_option("--box", box, "Half width of the box for interval points");
  pair->add_option("--tolerance", tolerance, "Standard error above which the estimate is flagged");
  pair->add_flag("--direct", direct, "Allow direct sampling of the lambda cycle");

  int trials = 100;
  bool verbose = false;
  auto* cover = app.add_subcommand("covering-check", "Preimages of the two-sheeted covering map");
  cover->add_option("--n", n, "Ambient dimension");
  cover->add_option("--trials", trials, "Random targets")->check(CLI::PositiveNumber);
  cover->add_option("--seed", seed, "RNG seed");
  cover->add_flag("--verbose", verbose, "List every trial");

  std::string cache_action;
  auto* cache = app.add_subcommand("cache", "Disk cache maintenance");
  cache->add_option("action", cache_action, "clear | stat")->required()->check(CLI::IsMember({"clear", "stat"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "UsageError", e.what());
  }
  g.format = g.json_flag ? Format::Json : format == "json" ? Format::Json : format == "csv" ? Format::Csv : Format::Text;

  try {
    if (*basis) {
      const auto b = enumerate_basis(k, l, g.threads);
      json rows = json::array();
      for (std::size_t i = 0; i < b.graphs.size(); ++i)
        rows.push_back({{"index", i}, {"graph", format_graph(b.graphs[i])}});
      emit(g, {{"k", k}, {"l", l}, {"dim", b.dim()}, {"graphs", rows}}, "graphs");
    } else if (*betti) {
      if (k < 1) throw UsageError("--ord must be at least 1");
      auto cx = make_complex(g);
      if (deg && !table) {
        emit(g, report_json(cx.betti(k, *deg)));
      } else {
        json rows = json::array();
        const int top = max_degree(k);
        for (int d = 0; d <= top; ++d) {
          progress("H^{" + std::to_string(k) + "," + std::to_string(d) + "}");
          rows.push_back(report_json(cx.betti(k, d)));
        }
        emit(g, {{"k", k}, {"table", rows}}, "table");
      }
    } else if (*delta_cmd) {
      const Graph gr = parse_graph(graph_text);
      const auto gv = GraphVector::of(gr);
      const auto d = delta(gr);
      const auto gd = grading(gr);
      emit(g, {{"graph", format_graph(gr)},
               {"canonical", terms_json(gv)},
               {"k", gd.ord},
               {"l", gd.deg},
               {"delta", terms_json(d)},
               {"terms", d.size()}},
           "delta");
    } else if (*cocycle) {
      const auto v = read_cochain(file);
      const auto d = delta_vec(v);
      emit(g, {{"file", file}, {"terms", v.size()}, {"is_cocycle", d.is_zero()}, {"delta", terms_json(d)}}, "delta");
    } else if (*euler) {
      if (k < 1) throw UsageError("--ord must be at least 1");
      auto cx = make_complex(g);
      emit(g, {{"k", k}, {"chi", cx.euler_characteristic(k)}});
    } else if (*chord) {
      if (k < 0) throw UsageError("--order must be nonnegative");
      emit(g, {{"order", k},
               {"relations", no_1t ? "4T" : "4T+1T"},
               {"diagrams", enumerate_chords(k).size()},
               {"dim", algebra_dimension(k, !no_1t)}});
    } else if (*link) {
      MCOptions opt{samples, seed, g.threads, 1e-5, tolerance};
      MCEstimate e;
      progress("sampling " + std::to_string(samples) + " points");
      if (preset == "s1-vs-i1") {
        if (n < 4) throw UsageError("s1-vs-i1 needs --n >= 4");
        const Immersion f(ImmersionSpec::figure_eight(n));
        e = linking(n, resolution_sphere(f), crossing_segment(f), opt);
      } else {
        if (n != 3) throw UsageError("the " + preset + " preset lives in R^3; pass --n 3");
        const Vec offset = preset == "hopf" ? Vec::Zero(3) : Vec((Vec(3) << 10, 0, 0).finished());
        e = linking(3, hopf_circle_a(), hopf_circle_b(offset), opt);
      }
      json out = to_json(e);
      out["preset"] = preset;
      out["n"] = n;
      out["nearest_integer"] = std::lround(e.value);
      emit(g, out);
    } else if (*pair) {
      PairingOptions opt;
      json provenance;
      if (!job.empty()) {
        std::ifstream in(job);
        if (!in) throw UsageError("cannot open job file '" + job + "'");
        json j;
        in >> j;
        if (!j.contains("cochain")) throw UsageError("job file needs a cochain");
        file = j["cochain"].get<std::string>();
        if (!std::filesystem::path(file).is_absolute())
          file = (std::filesystem::path(job).parent_path() / file).string();
        cycle = j.value("cycle", cycle);
        n = j.value("n", n);
        samples = j.value("samples", samples);
        seed = j.value("seed", seed);
        if (j.contains("eps")) opt.eps = j["eps"].get<std::array<double, 2>>();
        if (j.contains("delta")) opt.delta = j["delta"].get<std::array<double, 2>>();
        if (j.contains("strata")) {
          const auto& s = j["strata"];
          complement_fraction = s.value("complement_fraction", complement_fraction);
          box = s.value("box", box);
          direct = s.value("direct", direct);
        }
      } else {
        opt.eps = parse_pair(eps_text, "--eps");
        if (!delta_text.empty()) opt.delta = parse_pair(delta_text, "--delta");
      }
      if (file.empty()) throw UsageError("pair needs --cochain or --job");
      if (cycle != "alpha" && cycle != "lambda") throw UsageError("cycle must be alpha or lambda");
      opt.cycle = cycle == "alpha" ? CycleKind::Alpha : CycleKind::Lambda;
      opt.n = n;
      opt.samples = samples;
      opt.seed = seed;
      opt.threads = g.threads;
      opt.complement_fraction = complement_fraction;
      opt.box = box;
      opt.tolerance = tolerance;
      opt.direct_lambda = direct;
      const auto cochain = read_cochain(file);
      progress("sampling " + std::to_string(samples) + " points over " + std::to_string(cochain.size()) + " graphs");
      const auto r = pairing(cochain, opt);
      if (!r.cocycle) progress("warning: the cochain is not a cocycle; the estimate is chain-level");
      json out = to_json(r);
      out["cochain"] = file;
      out["cycle"] = cycle;
      out["n"] = n;
      out["eps"] = opt.eps;
      out["delta"] = {opt.delta[0] > 0 ? opt.delta[0] : opt.eps[0] * opt.eps[0],
                      opt.delta[1] > 0 ? opt.delta[1] : opt.eps[1] * opt.eps[1]};
      out["complement_fraction"] = complement_fraction;
      out["box"] = box;
      out["sign"] = r.total.value > 0 ? "+" : r.total.value < 0 ? "-" : "0";
      if (opt.cycle == CycleKind::Alpha)
        out["strata_note"] =
            "localized: one interval point per affine window, zoomed coordinates; "
            "complement: remaining configurations in global coordinates";
      emit(g, out, "strata");
    } else if (*cover) {
      if (n < 3) throw UsageError("--n must be at least 3");
      json rows = json::array();
      int two = 0, agree = 0;
      double max_res = 0;
      for (int i = 0; i < trials; ++i) {
        const auto [v3, v4] = random_covering_target(n, seed, static_cast<std::uint64_t>(i));
        const auto rep = covering_check(v3, v4);
        two += rep.preimages.size() == 2;
        agree += rep.signs_agree;
        max_res = std::max(max_res, rep.max_residual);
        if (verbose)
          rows.push_back({{"trial", i},
                          {"preimages", rep.preimages.size()},
                          {"residual", rep.max_residual},
                          {"det1", rep.preimages[0].det},
                          {"det2", rep.preimages[1].det},
                          {"signs_agree", rep.signs_agree}});
      }
      json out{{"n", n},
               {"trials", trials},
               {"seed", seed},
               {"two_preimages", two},
               {"signs_agree", agree},
               {"max_residual", max_res},
               {"ok", two == trials && agree == trials && max_res < 1e-8}};
      if (verbose) out["rows"] = rows;
      emit(g, out, verbose ? "rows" : "");
    } else if (*cache) {
      DiskCache dc(cache_dir(g));
      if (cache_action == "stat") {
        const auto s = dc.stat();
        emit(g, {{"dir", dc.dir().string()}, {"files", s.files}, {"bytes", s.bytes}});
      } else {
        emit(g, {{"dir", dc.dir().string()}, {"removed", dc.clear()}});
      }
    }
  } catch (const UsageError& e) {
    return fail(2, "UsageError", e.what());
  } catch (const ParseError& e) {
    return fail(1, "ParseError", e.what(), {{"offset", e.offset()}});
  } catch (const GraphError& e) {
    return fail(1, to_string(e.kind()), e.what());
  } catch (const IntegratorError& e) {
    return fail(1, to_string(e.kind()), e.what());
  } catch (const GeometryError& e) {
    return fail(1, to_string(e.kind()), e.what());
  } catch (const NoCohomology& e) {
    return fail(1, "NoCohomology", e.what());
  } catch (const json::exception& e) {
    return fail(1, "InvalidInput", e.what());
  } catch (const std::exception& e) {
    return fail(1, "Error", e.what());
  }
  return 0;
}
