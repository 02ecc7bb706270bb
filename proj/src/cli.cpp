#include "meandim/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include "meandim/combinat.hpp"
#include "meandim/covers.hpp"
#include "meandim/embed.hpp"
#include "meandim/serialize.hpp"

namespace meandim {
namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Outcome {
  Json artifact;
  bool ok = true;
  std::string failure;
  std::optional<std::string> csv;
};

struct Context {
  std::uint64_t seed = 0;
  std::string out_path;
  int window = 0;
  std::string format = "json";
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256

  Json read_input(const std::string& path) {
    std::string text = read_file(path);
    inputs.emplace_back(path, sha256_hex(text));
    return parse_json_text(text, path);
  }

  SymbolicSystem load_system(const std::string& path) {
    Json j = read_input(path);
    if (j.contains("system") && j.at("system").is_object()) j = j.at("system");
    if (window > 0) j["max_window"] = window;
    return system_from_json(j);
  }
};

double approx(const Rational& q) { return q.get_d(); }

Json report_json(const EpsilonReport& r) {
  Json j;
  j["pass"] = r.pass;
  j["complete"] = r.complete;
  j["width"] = r.width;
  j["window"] = r.window;
  j["radius"] = r.radius;
  j["cylinders"] = r.cylinders;
  j["pairs"] = r.pairs;
  j["separated_by_f"] = r.separated_by_f;
  j["separated_by_pi"] = r.separated_by_pi;
  j["tau"] = r.tau ? Json(to_string(*r.tau)) : Json(nullptr);
  j["tau_float_approx"] = r.tau ? Json(approx(*r.tau)) : Json(nullptr);
  if (r.witness)
    j["witness"] = Json::array({Json{{"origin", r.witness->first.origin}, {"symbols", r.witness->first.symbols}},
                                Json{{"origin", r.witness->second.origin}, {"symbols", r.witness->second.symbols}}});
  return j;
}

Json rokhlin_json(const MarkerCertificate& cert, const RokhlinFunction& r, const RokhlinReport& rep, int span) {
  Json j;
  j["type"] = "rokhlin";
  j["marker"] = to_json(cert);
  j["span"] = span;
  j["lo"] = r.lo;
  j["hi"] = r.hi;
  j["height"] = r.height;
  j["depth"] = r.depth;
  j["ok"] = rep.ok;
  j["windows"] = rep.windows;
  j["max_bad"] = rep.max_bad;
  j["first_failure"] = rep.first_failure;
  return j;
}

Json orbit_json(const PeriodicOrbit& o) {
  return Json{{"base", o.base}, {"period", o.period}, {"target", vec_json(o.target)}, {"v", vec_json(o.v)}};
}

int parse_pairs(const std::string& arg) {
  const std::string prefix = "exhaustive:";
  if (arg.rfind(prefix, 0) != 0) throw UsageError("--pairs must look like exhaustive:<width>");
  try {
    int w = std::stoi(arg.substr(prefix.size()));
    if (w < 1) throw UsageError("--pairs width must be positive");
    return w;
  } catch (const std::logic_error&) {
    throw UsageError("--pairs width is not an integer");
  }
}

std::map<int, Rational> parse_values(const std::string& s) {
  std::map<int, Rational> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--values entries look like index=value");
    out[std::stoi(item.substr(0, eq))] = parse_rational(item.substr(eq + 1));
  }
  return out;
}

std::vector<Vec> random_basis(int count, int dim, std::uint64_t seed) {
  GridSampler g(derive_seed(seed, 0xba5eULL));
  std::vector<Vec> V;
  for (int i = 0; i < count; ++i) V.push_back(g.vector(static_cast<std::size_t>(dim)));
  if (rank_of(V) != count) throw std::runtime_error("sampled base is degenerate");
  return V;
}

// Verification of a stored artifact; needs nothing but the artifact.
Outcome verify_artifact(const Json& j, Context& ctx);

Outcome verify_manifest(const Json& m) {
  Outcome o;
  Json res;
  res["type"] = "verification";
  res["of"] = "manifest";
  std::vector<std::string> cmd = m.at("command").get<std::vector<std::string>>();
  for (const auto& in : m.at("inputs")) {
    std::string path = in.at("path").get<std::string>();
    std::string now;
    try {
      now = sha256_hex(read_file(path));
    } catch (const std::exception&) {
      now = "";
    }
    if (now != in.at("sha256").get<std::string>()) {
      o.ok = false;
      o.failure = "input changed or missing: " + path;
    }
  }
  if (!o.ok) {
    res["pass"] = false;
    res["first_failure"] = o.failure;
    o.artifact = res;
    return o;
  }
  namespace fs = std::filesystem;
  fs::path tmp = fs::temp_directory_path() / ("meandim-replay-" + std::to_string(::getpid()) + "-" +
                                               std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  bool replaced = false;
  for (std::size_t i = 0; i < cmd.size(); ++i) {
    if (cmd[i] == "--out" && i + 1 < cmd.size()) {
      cmd[i + 1] = tmp.string();
      replaced = true;
    } else if (cmd[i].rfind("--out=", 0) == 0) {
      cmd[i] = "--out=" + tmp.string();
      replaced = true;
    }
  }
  if (!replaced) throw UsageError("manifest command has no --out");
  std::ostringstream sink_out, sink_err;
  int code = run_cli(cmd, sink_out, sink_err);
  std::string fresh;
  if (fs::exists(tmp)) fresh = sha256_hex(read_file(tmp.string()));
  std::error_code ec;
  fs::remove(tmp, ec);
  fs::remove(tmp.string() + ".manifest.json", ec);
  const std::string recorded = m.at("outputs").at(0).at("sha256").get<std::string>();
  res["replay_exit_code"] = code;
  res["recorded_sha256"] = recorded;
  res["replayed_sha256"] = fresh;
  o.ok = fresh == recorded && code == m.value("exit_code", 0);
  if (!o.ok) o.failure = fresh.empty() ? "replay produced no output: " + sink_err.str() : "replayed output differs from the recorded hash";
  // The stored artifact is checked when it is still in place.
  const std::string stored_path = m.at("outputs").at(0).at("path").get<std::string>();
  if (fs::exists(stored_path)) {
    std::string stored = sha256_hex(read_file(stored_path));
    res["stored_sha256"] = stored;
    if (o.ok && stored != recorded) {
      o.ok = false;
      o.failure = "stored output differs from the recorded hash: " + stored_path;
    }
  }
  res["pass"] = o.ok;
  if (!o.ok) res["first_failure"] = o.failure;
  o.artifact = res;
  return o;
}

Outcome verify_artifact(const Json& j, Context& ctx) {
  if (!j.is_object() || !j.contains("type")) throw JsonInputError("artifact has no \"type\"");
  const std::string type = j.at("type").get<std::string>();
  Outcome o;
  Json res;
  res["type"] = "verification";
  res["of"] = type;
  auto fail = [&](const std::string& why) {
    if (o.ok) o.failure = why;
    o.ok = false;
  };
  if (type == "manifest") return verify_manifest(j);
  if (type == "marker") {
    auto cert = marker_from_json(j);
    auto rep = verify_marker(cert);
    res["checked"] = rep.checked;
    if (!rep.ok) fail(rep.first_failure);
  } else if (type == "rokhlin") {
    auto cert = marker_from_json(j.at("marker"));
    auto mrep = verify_marker(cert);
    if (!mrep.ok) fail("marker: " + mrep.first_failure);
    auto r = rokhlin_from_marker(cert);
    int span = j.at("span").get<int>();
    auto rep = check_rokhlin(cert.system, r, span);
    res["windows"] = rep.windows;
    if (!rep.ok) fail(rep.first_failure);
    if (rokhlin_json(cert, r, rep, span) != j) fail("recorded Rokhlin report does not match the recomputation");
  } else if (type == "independence") {
    auto cert = certificate_from_json(j);
    if (!cert.pass) fail("certificate records a failed check");
    if (!reverify(cert)) fail("rank checks do not reproduce");
  } else if (type == "periodic") {
    auto sys = system_from_json(j.at("system"));
    auto f = function_from_json(j.at("f"), sys);
    auto [inj, pairs] = periodic_injective(f, sys, j.at("m_max").get<int>());
    res["pairs_checked"] = pairs;
    if (!inj) fail("I_f is not injective on the periodic points");
  } else if (type == "embedding") {
    auto sys = system_from_json(j.at("system"));
    auto cert = marker_from_json(j.at("marker"));
    auto mrep = verify_marker(cert);
    if (!mrep.ok) fail("marker: " + mrep.first_failure);
    auto Fc = certificate_from_json(j.at("F_certificate"));
    auto f = function_from_json(j.at("f"), sys);
    if (Fc.lemma != "F_shifted_blocks" || !Fc.pass || Fc.sampled != f.F.v || f.F.d < 1) {
      fail("F certificate does not match the stored function");
    } else {
      Json recomputed = Json::array(), recorded = Json::array();
      for (const auto& c : shifted_block_checks(f.F.v, f.F.n, Fc.dim / f.F.d, f.F.d)) recomputed.push_back(to_json(c));
      for (const auto& c : Fc.checks) recorded.push_back(to_json(c));
      if (recomputed != recorded) fail("F rank checks do not reproduce");
    }
    const Json& chk = j.at("check");
    auto rep = check_epsilon_embedding(f, sys, nullptr, parse_rational(j.at("epsilon").get<std::string>()),
                                       chk.at("width").get<int>(), chk.at("radius").get<int>());
    res["check"] = report_json(rep);
    if (!rep.pass) fail("epsilon check fails");
    if (report_json(rep) != chk) fail("recorded epsilon report does not match the recomputation");
  } else {
    throw JsonInputError("cannot verify artifacts of type \"" + type + "\"");
  }
  (void)ctx;
  res["pass"] = o.ok;
  if (!o.ok) res["first_failure"] = o.failure;
  o.artifact = res;
  return o;
}

std::string mdim_csv(const Json& entries) {
  std::string s = "n,D,value,value_float_approx,flagged\n";
  for (const auto& e : entries)
    s += std::to_string(e.at("n").get<int>()) + "," + std::to_string(e.at("D").get<int>()) + "," + e.at("value").get<std::string>() +
         "," + std::to_string(e.at("value_float_approx").get<double>()) + "," + (e.at("flagged").get<bool>() ? "1" : "0") + "\n";
  return s;
}

int emit(const Outcome& o, Context& ctx, const std::vector<std::string>& args, double seconds, std::ostream& out,
         std::ostream& err) {
  std::string text;
  if (ctx.format == "csv") {
    if (!o.csv) throw UsageError("csv output is not available for this command");
    text = *o.csv;
  } else {
    text = dump(o.artifact);
  }
  int code = o.ok ? 0 : 2;
  if (ctx.out_path.empty()) {
    out << text;
  } else {
    write_file_atomic(ctx.out_path, text);
    Json m;
    m["type"] = "manifest";
    m["version"] = kVersion;
    m["command"] = args;
    m["seed"] = std::to_string(ctx.seed);
    Json ins = Json::array();
    for (const auto& [p, h] : ctx.inputs) ins.push_back(Json{{"path", p}, {"sha256", h}});
    m["inputs"] = ins;
    m["outputs"] = Json::array({Json{{"path", ctx.out_path}, {"sha256", sha256_hex(text)}}});
    m["exit_code"] = code;
    m["wall_time_seconds_float"] = seconds;
    write_file_atomic(ctx.out_path + ".manifest.json", dump(m));
    out << ctx.out_path << "\n";
  }
  if (!o.ok) err << "verification failed: " << o.failure << "\n";
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  Context ctx;
  CLI::App app{"Mean dimension and embedding toolkit", "meandim"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", ctx.seed, "Random seed");
  app.add_option("--out", ctx.out_path, "Write the artifact here, with a manifest beside it");
  app.add_option("--window", ctx.window, "Override the system window budget");
  app.add_option("--format", ctx.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  // Each subcommand owns its variables so defaults never leak between them.
  std::string system_path, cert_path, f_path, pairs = "exhaustive:6", values, lemma = "linear";
  std::string emb_eps = "1/8", ver_eps, per_eps = "1/4", delta = "1/4", mdim = "0";
  int N = 2, d = 0, emb_d = 1, per_d = 1, m = 3, emb_width = 6, md_width = 1, n = 4, radius = 0, budget = 4096, perdim = 0,
      y = 1, M = 2, k = 1, dim = 4, base = 1, extra = 1, shift = 1, start_width = 0;
  std::function<Outcome()> action;

  auto* marker = app.add_subcommand("marker", "Build a marker certificate");
  marker->add_option("--system", system_path)->required();
  marker->add_option("--N", N)->required();
  marker->add_option("--d", d);
  marker->add_option("--max-start-width", start_width);
  marker->callback([&] {
    action = [&] {
      auto sys = ctx.load_system(system_path);
      MarkerOptions opt;
      opt.max_start_width = start_width;
      auto cert = build_marker(CylinderAlgebra(sys), N, d, opt);
      auto rep = verify_marker(cert);
      Outcome o;
      o.artifact = to_json(cert);
      o.artifact["verified"] = rep.ok;
      o.artifact["checked"] = rep.checked;
      o.ok = rep.ok;
      o.failure = rep.first_failure;
      return o;
    };
  });

  auto* rokhlin = app.add_subcommand("rokhlin", "Check the Rokhlin function of a marker certificate");
  rokhlin->add_option("--cert", cert_path)->required();
  rokhlin->callback([&] {
    action = [&] {
      auto cert = marker_from_json(ctx.read_input(cert_path));
      if (ctx.window > 0) throw UsageError("--window does not apply to a stored certificate");
      auto r = rokhlin_from_marker(cert);
      int span = std::max(1, cert.N - 1);
      auto rep = check_rokhlin(cert.system, r, span);
      Outcome o;
      o.artifact = rokhlin_json(cert, r, rep, span);
      o.ok = rep.ok;
      o.failure = rep.first_failure;
      return o;
    };
  });

  auto* embed = app.add_subcommand("embed", "Build and check an epsilon-embedding");
  embed->add_option("--system", system_path)->required();
  embed->add_option("--d", emb_d);
  embed->add_option("--epsilon", emb_eps);
  embed->add_option("--delta", delta);
  embed->add_option("--mdim", mdim);
  embed->add_option("--width", emb_width);
  embed->add_option("--radius", radius);
  embed->callback([&] {
    action = [&] {
      auto sys = ctx.load_system(system_path);
      PipelineOptions opt;
      opt.d = emb_d;
      opt.eps = parse_rational(emb_eps);
      opt.delta = parse_rational(delta);
      opt.mdim_est = parse_rational(mdim);
      opt.seed = ctx.seed;
      auto res = build_pipeline(sys, opt);
      auto rep = check_epsilon_embedding(res.f, sys, nullptr, opt.eps, emb_width, radius);
      Outcome o;
      Json& j = o.artifact;
      j["type"] = "embedding";
      j["system"] = to_json(sys);
      j["epsilon"] = to_string(opt.eps);
      j["delta"] = to_string(opt.delta);
      j["seed"] = std::to_string(ctx.seed);
      j["plan"] = Json{{"N", res.plan.N}, {"M", res.plan.M}, {"S", res.plan.S}, {"eps_prime", to_string(res.plan.eps_prime)},
                       {"mdim_used", to_string(res.plan.mdim_used)}};
      j["alpha_width"] = res.alpha_width;
      j["marker"] = to_json(res.marker);
      j["marker_verified"] = res.marker_report.ok;
      j["F_certificate"] = to_json(res.F.cert);
      j["f"] = to_json(res.f);
      j["check"] = report_json(rep);
      o.ok = res.marker_report.ok && res.F.cert.pass && rep.pass;
      if (!o.ok) o.failure = !rep.pass ? "epsilon check fails" : "construction certificate fails";
      return o;
    };
  });

  auto* vemb = app.add_subcommand("verify-embedding", "Sweep cylinder pairs for an embedding artifact");
  vemb->add_option("--f", f_path)->required();
  vemb->add_option("--pairs", pairs);
  vemb->add_option("--radius", radius);
  vemb->add_option("--epsilon", ver_eps);
  vemb->callback([&] {
    action = [&] {
      Json j = ctx.read_input(f_path);
      if (!j.contains("system") || !j.contains("f")) throw JsonInputError(f_path + ": artifact needs \"system\" and \"f\"");
      Json sj = j.at("system");
      if (ctx.window > 0) sj["max_window"] = ctx.window;
      auto sys = system_from_json(sj);
      auto f = function_from_json(j.at("f"), sys);
      std::string e = !ver_eps.empty() ? ver_eps : j.value("epsilon", std::string("1/8"));
      auto rep = check_epsilon_embedding(f, sys, nullptr, parse_rational(e), parse_pairs(pairs), radius);
      Outcome o;
      o.artifact = report_json(rep);
      o.artifact["type"] = "epsilon_check";
      o.artifact["epsilon"] = e;
      o.ok = rep.pass;
      o.failure = "an eps-far pair is not separated";
      return o;
    };
  });

  auto* periodic = app.add_subcommand("periodic", "Build an injective function on periodic points");
  periodic->add_option("--system", system_path)->required();
  periodic->add_option("--m", m);
  periodic->add_option("--d", per_d);
  periodic->add_option("--epsilon", per_eps);
  periodic->callback([&] {
    action = [&] {
      auto sys = ctx.load_system(system_path);
      auto im = build_periodic_immersion(sys, m, per_d, ctx.seed, parse_rational(per_eps));
      Outcome o;
      Json& j = o.artifact;
      j["type"] = "periodic";
      j["system"] = to_json(sys);
      j["m_max"] = m;
      j["d"] = per_d;
      j["seed"] = std::to_string(ctx.seed);
      j["f"] = to_json(im.f);
      Json orbits = Json::array(), checks = Json::array();
      for (const auto& orb : im.orbits) orbits.push_back(orbit_json(orb));
      for (const auto& c : im.checks) checks.push_back(to_json(c));
      j["orbits"] = orbits;
      j["checks"] = checks;
      j["pairs_checked"] = im.pairs_checked;
      j["injective"] = im.injective;
      o.ok = im.injective;
      o.failure = "I_f is not injective on the periodic points";
      return o;
    };
  });

  auto* mdimc = app.add_subcommand("mdim", "Mean dimension report for a width partition");
  mdimc->add_option("--system", system_path)->required();
  mdimc->add_option("--width", md_width);
  mdimc->add_option("--n", n);
  mdimc->add_option("--budget", budget);
  mdimc->add_option("--perdim", perdim, "Also report periodic dimensions up to this period");
  mdimc->callback([&] {
    action = [&] {
      auto sys = ctx.load_system(system_path);
      CylinderAlgebra alg(sys);
      auto entries = mdim_report(alg, width_partition(alg, md_width), n, budget);
      Outcome o;
      Json rows = Json::array();
      for (const auto& e : entries)
        rows.push_back(Json{{"n", e.n}, {"D", e.D}, {"value", to_string(e.value)}, {"value_float_approx", approx(e.value)},
                            {"flagged", e.flagged}});
      o.artifact["type"] = "mdim";
      o.artifact["system"] = to_json(sys);
      o.artifact["width"] = md_width;
      o.artifact["entries"] = rows;
      if (perdim > 0) {
        Json pd = Json::array();
        for (const auto& e : perdim_report(sys, perdim))
          pd.push_back(Json{{"m", e.m}, {"dim", e.dim}, {"value", to_string(e.value)}, {"empty", e.empty}});
        o.artifact["perdim"] = pd;
      }
      o.csv = mdim_csv(rows);
      return o;
    };
  });

  auto* lemmas = app.add_subcommand("lemmas", "Run a combinatorial or algebraic lemma");
  lemmas->require_subcommand(1);
  auto* znset = lemmas->add_subcommand("znset", "Greedy separated subset of Z_N");
  znset->add_option("--N", N)->required();
  znset->add_option("--y", y)->required();
  znset->callback([&] {
    action = [&] {
      auto s = greedy_separated_set(N, y);
      Outcome o;
      o.artifact["A"] = s.A;
      o.artifact["size"] = s.A.size();
      o.ok = is_separated(N, y, s.A);
      o.failure = "greedy set is not separated";
      std::string csv = "a\n";
      for (int a : s.A) csv += std::to_string(a) + "\n";
      o.csv = csv;
      return o;
    };
  });
  auto* mconst = lemmas->add_subcommand("marker-constant", "Marker constant (2d+2)N-1");
  mconst->add_option("--d", d)->required();
  mconst->add_option("--N", N)->required();
  mconst->callback([&] {
    action = [&] {
      Outcome o;
      o.artifact = Json{{"d", d}, {"N", N}, {"value", marker_constant(d, N)}};
      return o;
    };
  });
  auto* brute = lemmas->add_subcommand("brute", "Exhaustive paired-symbol determinant check");
  brute->add_option("--k", k)->required();
  brute->callback([&] {
    action = [&] {
      auto rep = brute_verify(k, ctx.seed);
      Outcome o;
      o.artifact = Json{{"k", rep.k}, {"layouts", rep.layouts}, {"nonzero", rep.nonzero},
                        {"agree_with_random", rep.agree_with_random}, {"failures", rep.failures.size()}};
      o.ok = rep.failures.empty();
      o.failure = std::to_string(rep.failures.size()) + " layouts with a vanishing determinant";
      return o;
    };
  });
  auto* goodseg = lemmas->add_subcommand("goodseg", "Good segment offset r");
  goodseg->add_option("--M", M)->required();
  goodseg->add_option("--values", values, "index=value pairs, comma separated")->required();
  goodseg->callback([&] {
    action = [&] {
      Outcome o;
      o.artifact = Json{{"M", M}, {"r", good_segment(parse_values(values), M)}};
      return o;
    };
  });
  auto* indep = lemmas->add_subcommand("independence", "Seeded general-position certificate");
  indep->add_option("--lemma", lemma)->check(CLI::IsMember({"linear", "affine", "rank-two", "paired"}));
  indep->add_option("--dim", dim);
  indep->add_option("--base", base);
  indep->add_option("--extra", extra);
  indep->add_option("--shift", shift);
  indep->add_option("--k", k);
  indep->callback([&] {
    action = [&] {
      IndependenceCertificate cert;
      Json layout;
      if (lemma == "linear") {
        cert = sample_linear_extension(random_basis(base, dim, ctx.seed), extra, dim, ctx.seed);
      } else if (lemma == "affine") {
        cert = sample_affine_extension(random_basis(base, dim, ctx.seed), extra, dim, ctx.seed);
      } else if (lemma == "rank-two") {
        cert = rank_two_extension_check(random_basis(base, dim, ctx.seed), shift, dim, ctx.seed);
      } else {
        auto L = random_layout(k, ctx.seed);
        cert = paired_symbol_matrix_check(L, ctx.seed);
        layout = L.cells;
      }
      Outcome o;
      o.artifact = to_json(cert);
      if (!layout.is_null()) o.artifact["layout"] = layout;
      o.ok = cert.pass;
      o.failure = "no sample passed within the retry bound";
      return o;
    };
  });

  auto* verify = app.add_subcommand("verify", "Re-check an artifact or replay a manifest");
  verify->add_option("--cert", cert_path)->required();
  verify->callback([&] {
    action = [&] {
      Json j = ctx.read_input(cert_path);
      return verify_artifact(j, ctx);
    };
  });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }
  if (!action) {
    err << "usage error: no command given\n";
    return 1;
  }
  try {
    Outcome o = action();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return emit(o, ctx, args, secs, out, err);
  } catch (const JsonInputError& e) {
    err << "input error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const WindowExceeded& e) {
    err << "window budget exceeded: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace meandim
