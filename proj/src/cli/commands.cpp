#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "pddrm/cli.hpp"
#include "pddrm/datagen.hpp"
#include "pddrm/ddrm.hpp"
#include "pddrm/external_denoiser.hpp"
#include "pddrm/fd.hpp"
#include "pddrm/io.hpp"
#include "pddrm/manifest.hpp"
#include "pddrm/parallel.hpp"
#include "pddrm/spectral.hpp"
#include "pddrm/verify.hpp"

namespace fs = std::filesystem;

namespace pddrm {
namespace {

using ArgList = std::vector<std::string>;

struct GenDataOptions {
  std::size_t count = 0;
  std::string mix = "nn";
  std::uint64_t seed = 0;
  std::size_t n = 64;
  std::string out;
  unsigned threads = 0;
  std::size_t net_width = 32;
  double net_input_scale = 10.0;
  int max_param = 8;
};

struct RunOptions {
  std::string problem = "forward";
  std::string method = "ddrm";
  std::string dataset;
  std::string denoiser;  // empty: spectral-prior for ddrm, identity for dry
  std::string train;
  double eta = std::numeric_limits<double>::quiet_NaN();    // NaN: reference value for the problem
  double eta_b = std::numeric_limits<double>::quiet_NaN();
  double sigma_f = 1e-6;
  double sigma_nm = 1e-6;
  std::size_t steps = 100;
  double sigma_min = 0.01;
  double sigma_max = 2.0;
  std::uint64_t seed = 0;
  std::string out_dir;
  unsigned threads = 0;
  bool save_predictions = false;
};

struct VerifyOptions {
  std::string target;
  std::size_t draws = 10000;
  std::uint64_t seed = 0;
  std::size_t n = 64;
  std::string out;
  unsigned threads = 0;
};

struct RenderOptions {
  std::string input;
  std::size_t index = 0;
  std::string channel = "u";
  std::string out;
};

Problem parse_problem(const std::string& s) {
  if (s == "forward") return Problem::Forward;
  if (s == "inverse") return Problem::Inverse;
  throw ConfigError("--problem must be forward or inverse");
}

Method method_enum(const std::string& method, Problem p) {
  const bool f = p == Problem::Forward;
  if (method == "ddrm") return f ? Method::DdrmForward : Method::DdrmInverse;
  if (method == "dry") return f ? Method::DryForward : Method::DryInverse;
  if (method == "fd") return f ? Method::FdForward : Method::FdInverse;
  if (method == "spectral") return f ? Method::SpectralForward : Method::SpectralInverse;
  throw ConfigError("--method must be one of ddrm, dry, fd, spectral");
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string(what) + " is required");
  if (!fs::is_regular_file(path)) throw ConfigError(std::string(what) + " not found: " + path);
}

// ---- gen-data ---------------------------------------------------------------

int cmd_gen_data(const GenDataOptions& o, std::ostream& out) {
  RunManifest man;
  man.started_at = utc_timestamp();
  const Mix mix = Mix::parse(o.mix);
  mix.validate();
  if (o.count == 0) throw ConfigError("--count must be positive");
  const GridSpec grid(o.n);
  DatasetOptions dopts;
  dopts.net_width = o.net_width;
  dopts.net_input_scale = o.net_input_scale;
  dopts.max_param = o.max_param;
  dopts.threads = o.threads;
  const auto samples = gen_dataset(o.count, mix, o.seed, grid, dopts);
  write_pdds(o.out, samples);

  man.command = "gen-data";
  man.argv = {"gen-data", "--count", std::to_string(o.count), "--mix", mix.to_string(),
              "--seed", std::to_string(o.seed), "--n", std::to_string(o.n), "--out", o.out,
              "--net-width", std::to_string(o.net_width), "--net-input-scale", exact_double(o.net_input_scale),
              "--max-param", std::to_string(o.max_param)};
  man.output_flag = "--out";
  man.config = {{"count", o.count}, {"mix", mix.to_string()}, {"n", o.n}, {"net_width", o.net_width},
                {"net_input_scale", o.net_input_scale}, {"max_param", o.max_param}};
  man.seed = o.seed;
  man.outputs = {o.out};
  man.finished_at = utc_timestamp();
  write_manifest(o.out + ".manifest.json", man);
  out << "wrote " << o.count << " samples (N=" << o.n << ") to " << o.out << "\n";
  return kExitOk;
}

// ---- run --------------------------------------------------------------------

int cmd_run(RunOptions o, std::ostream& out) {
  RunManifest man;
  man.started_at = utc_timestamp();
  const Problem problem = parse_problem(o.problem);
  const Method method = method_enum(o.method, problem);
  if (o.out_dir.empty()) throw ConfigError("--out-dir is required");
  require_file(o.dataset, "--dataset");
  const bool chain = o.method == "ddrm" || o.method == "dry";
  if (o.denoiser.empty() && chain) o.denoiser = o.method == "dry" ? "identity" : "spectral-prior";
  if (!chain && !o.denoiser.empty()) throw ConfigError("--denoiser only applies to ddrm and dry");
  if (o.method == "dry" && o.denoiser != "identity") throw ConfigError("the dry process uses the identity denoiser");
  if (std::isnan(o.eta)) o.eta = problem == Problem::Forward ? 8e-9 : 8e-4;
  if (std::isnan(o.eta_b)) o.eta_b = problem == Problem::Forward ? 9e-9 : 9e-4;

  const auto data = read_pdds(o.dataset);
  if (data.empty()) throw ConfigError("dataset is empty: " + o.dataset);
  const GridSpec grid = data.front().u.grid();
  const Channel target = problem == Problem::Forward ? Channel::U : Channel::F;

  std::unique_ptr<Denoiser> denoiser;
  DdrmConfig cfg;
  if (chain) {
    if (o.denoiser == "identity") {
      denoiser = builtin_identity_denoiser();
    } else if (o.denoiser == "spectral-prior") {
      require_file(o.train, "--train (training set for spectral-prior)");
      const auto train = read_pdds(o.train);
      if (!train.empty() && train.front().u.grid() != grid) throw ConfigError("--train grid differs from --dataset");
      denoiser = builtin_spectral_prior_denoiser(train);
    } else if (o.denoiser.rfind("external:", 0) == 0) {
      const std::string prog = o.denoiser.substr(9);
      require_file(prog, "external denoiser program");
      denoiser = std::make_unique<ExternalDenoiser>(prog);
    } else {
      throw ConfigError("--denoiser must be identity, spectral-prior or external:<path>");
    }
    cfg.eta = o.eta;
    cfg.eta_b = o.eta_b;
    cfg.sigma_f = o.sigma_f;
    if (problem == Problem::Inverse) {
      if (!(o.sigma_nm > 0.0)) throw ConfigError("--sigma-nm must be > 0");
      cfg.bridge = BridgeSpec::constant(grid, o.sigma_nm);
    }
    cfg.schedule = make_schedule(o.steps, o.sigma_min, o.sigma_max);
    cfg.validate(problem, grid);
    check_tractable(problem, cfg, grid);
  }

  std::vector<std::optional<ScalarField>> est(data.size());
  const EigenTable eig(grid);
  parallel_for(data.size(), o.threads, [&](std::size_t i) {
    const PairSample& s = data[i];
    if (s.u.grid() != grid) throw DimensionError("dataset mixes grid sizes");
    if (chain) {
      DdrmConfig c = cfg;
      c.seed = chain_seed_for_sample(o.seed, i);
      est[i] = run_chain(problem, problem == Problem::Forward ? s.f : s.u, *denoiser, c).estimate;
    } else if (o.method == "fd") {
      est[i] = problem == Problem::Forward ? fd_poisson_solve(s.f) : fd_inverse_estimate(s.u);
    } else {
      est[i] = problem == Problem::Forward ? spectral_poisson_solve(s.f, eig) : spectral_laplacian(s.u, eig);
    }
  });

  std::vector<ScalarField> preds;
  preds.reserve(est.size());
  for (auto& e : est) preds.push_back(std::move(*e));
  const EvalRecord rec = eval_batch(method, data, preds, target);

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  const fs::path csv = dir / "results.csv";
  write_file(csv, results_csv(o.method, o.problem, rec.per_sample, rec.mae));
  man.outputs = {csv.string()};
  if (o.save_predictions) {
    std::vector<PairSample> pairs;
    pairs.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
      pairs.emplace_back(problem == Problem::Forward ? data[i].f : preds[i],
                         problem == Problem::Forward ? preds[i] : data[i].u, Provenance::External);
    write_pdds(dir / "predictions.pdds", pairs);
    man.outputs.push_back((dir / "predictions.pdds").string());
  }

  man.command = "run";
  man.argv = {"run", "--problem", o.problem, "--method", o.method, "--dataset", o.dataset,
              "--seed", std::to_string(o.seed), "--out-dir", o.out_dir};
  man.config = {{"problem", o.problem}, {"method", o.method}, {"dataset", o.dataset}, {"samples", data.size()},
                {"n", grid.n()}};
  if (chain) {
    ArgList extra = {"--denoiser", o.denoiser, "--eta", exact_double(o.eta), "--eta-b", exact_double(o.eta_b),
                     "--sigma-f", exact_double(o.sigma_f), "--sigma-nm", exact_double(o.sigma_nm),
                     "--T", std::to_string(o.steps), "--sigma-min", exact_double(o.sigma_min),
                     "--sigma-max", exact_double(o.sigma_max)};
    if (!o.train.empty()) {
      extra.push_back("--train");
      extra.push_back(o.train);
    }
    man.argv.insert(man.argv.end(), extra.begin(), extra.end());
    man.config["denoiser"] = o.denoiser;
    man.config["train"] = o.train;
    man.config["eta"] = o.eta;
    man.config["eta_b"] = o.eta_b;
    if (problem == Problem::Forward)
      man.config["sigma_f"] = o.sigma_f;
    else
      man.config["sigma_nm"] = o.sigma_nm;
    man.config["T"] = o.steps;
    man.config["sigma_min"] = o.sigma_min;
    man.config["sigma_max"] = o.sigma_max;
  }
  if (o.save_predictions) man.argv.push_back("--save-predictions");
  man.output_flag = "--out-dir";
  man.seed = o.seed;
  man.records = {rec};
  man.finished_at = utc_timestamp();
  write_manifest(dir / "manifest.json", man);

  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", rec.mae);
  out << to_string(method) << " samples=" << rec.sample_count << " batch_mae=" << buf << "\n";
  return kExitOk;
}

// ---- verify -----------------------------------------------------------------

int cmd_verify(VerifyOptions o, std::ostream& out) {
  RunManifest man;
  man.started_at = utc_timestamp();
  if (o.out.empty()) o.out = "verify-" + o.target + ".json";
  const VerifyReport rep = run_verify(o.target, GridSpec(o.n), o.draws, o.seed, o.threads);
  nlohmann::ordered_json j;
  j["target"] = rep.target;
  j["pass"] = rep.pass;
  j["details"] = rep.details;
  write_file(o.out, j.dump(2) + "\n");

  man.command = "verify";
  man.argv = {"verify", "--target", o.target, "--draws", std::to_string(o.draws), "--seed",
              std::to_string(o.seed), "--n", std::to_string(o.n), "--out", o.out};
  man.output_flag = "--out";
  man.config = {{"target", o.target}, {"draws", o.draws}, {"n", o.n}};
  man.seed = o.seed;
  man.outputs = {o.out};
  man.finished_at = utc_timestamp();
  write_manifest(o.out + ".manifest.json", man);
  out << rep.target << ": " << (rep.pass ? "PASS" : "FAIL") << " (report: " << o.out << ")\n";
  return rep.pass ? kExitOk : kExitVerifyFailed;
}

// ---- render -----------------------------------------------------------------

int cmd_render(const RenderOptions& o, std::ostream& out) {
  RunManifest man;
  man.started_at = utc_timestamp();
  require_file(o.input, "--input");
  if (o.out.empty()) throw ConfigError("--out is required");
  if (o.channel != "u" && o.channel != "f") throw ConfigError("--channel must be u or f");
  const auto data = read_pdds(o.input);
  if (o.index >= data.size())
    throw ConfigError("--index " + std::to_string(o.index) + " out of range (file has " +
                      std::to_string(data.size()) + " records)");
  const ScalarField& field = o.channel == "u" ? data[o.index].u : data[o.index].f;
  const Render r = render_pgm(field);
  const std::string pgm = o.out + ".pgm", side = o.out + ".json";
  write_file(pgm, r.pgm);
  write_file(side, r.sidecar_json());

  man.command = "render";
  man.argv = {"render", "--input", o.input, "--index", std::to_string(o.index), "--channel", o.channel,
              "--out", o.out};
  man.output_flag = "--out";
  man.config = {{"input", o.input}, {"index", o.index}, {"channel", o.channel}};
  man.outputs = {pgm, side};
  man.finished_at = utc_timestamp();
  write_manifest(o.out + ".manifest.json", man);
  out << "wrote " << pgm << " and " << side << "\n";
  return kExitOk;
}

int dispatch(const ArgList& args, std::ostream& out, std::ostream& err, int depth);

int cmd_replay(const std::string& manifest, const std::string& out_dir, std::ostream& out, std::ostream& err,
               int depth) {
  if (depth > 0) throw ConfigError("replay manifests cannot replay themselves");
  const RunManifest m = read_manifest(manifest);
  std::optional<fs::path> dir;
  if (!out_dir.empty()) dir = fs::path(out_dir);
  return dispatch(replay_args(m, dir), out, err, depth + 1);
}

int dispatch(const ArgList& args, std::ostream& out, std::ostream& err, int depth) {
  CLI::App app{"Probabilistic Poisson solvers via DDRM chains over sine coefficients", "pddrm"};
  app.require_subcommand(1);

  GenDataOptions g;
  auto* gen = app.add_subcommand("gen-data", "Generate a PDDS dataset of (f, u) pairs");
  gen->add_option("--count", g.count, "Number of pairs")->required();
  gen->add_option("--mix", g.mix, "Provenance mix, e.g. nn or nn:0.5,type1:0.5")->capture_default_str();
  gen->add_option("--seed", g.seed, "Dataset seed")->required();
  gen->add_option("--n", g.n, "Interior points per axis")->capture_default_str();
  gen->add_option("--out", g.out, "Output .pdds path")->required();
  gen->add_option("--threads", g.threads, "Worker threads (0 = all cores)");
  gen->add_option("--net-width", g.net_width, "Hidden width of random networks")->capture_default_str();
  gen->add_option("--net-input-scale", g.net_input_scale, "First-layer weight scale")->capture_default_str();
  gen->add_option("--max-param", g.max_param, "Largest analytical integer parameter")->capture_default_str();

  RunOptions r;
  auto* run = app.add_subcommand("run", "Solve every pair of a dataset and report MAE");
  run->add_option("--problem", r.problem, "forward (u from f) or inverse (f from u)")->capture_default_str();
  run->add_option("--method", r.method, "ddrm, dry, fd or spectral")->capture_default_str();
  run->add_option("--dataset", r.dataset, "Test set (.pdds)")->required();
  run->add_option("--denoiser", r.denoiser, "identity, spectral-prior or external:<path>");
  run->add_option("--train", r.train, "Training set for the spectral-prior denoiser");
  run->add_option("--eta", r.eta, "Below-threshold noise ratio (default: 8e-9 forward, 8e-4 inverse)");
  run->add_option("--eta-b", r.eta_b, "Above-threshold mixing ratio (default: 9e-9 forward, 9e-4 inverse)");
  run->add_option("--sigma-f", r.sigma_f, "Forward measurement std")->capture_default_str();
  run->add_option("--sigma-nm", r.sigma_nm, "Inverse bridge coefficient std")->capture_default_str();
  run->add_option("--T", r.steps, "Chain steps")->capture_default_str();
  run->add_option("--sigma-min", r.sigma_min, "Smallest non-zero noise level")->capture_default_str();
  run->add_option("--sigma-max", r.sigma_max, "Largest noise level sigma_T")->capture_default_str();
  run->add_option("--seed", r.seed, "Run seed")->required();
  run->add_option("--out-dir", r.out_dir, "Output directory")->required();
  run->add_option("--threads", r.threads, "Worker threads (0 = all cores)");
  run->add_flag("--save-predictions", r.save_predictions, "Also write predictions.pdds");

  VerifyOptions v;
  auto* ver = app.add_subcommand("verify", "Monte-Carlo and exactness self-checks");
  ver->add_option("--target", v.target, "thm2, thm3, prop-marginal-forward, prop-marginal-inverse, bridge or eigen")
      ->required()
      ->check(CLI::IsMember(verify_targets()));
  ver->add_option("--draws", v.draws, "Monte-Carlo draws")->capture_default_str();
  ver->add_option("--seed", v.seed, "Seed")->capture_default_str();
  ver->add_option("--n", v.n, "Interior points per axis")->capture_default_str();
  ver->add_option("--out", v.out, "Report path (default verify-<target>.json)");
  ver->add_option("--threads", v.threads, "Worker threads (0 = all cores)");

  RenderOptions rd;
  auto* ren = app.add_subcommand("render", "Export one field as a 16-bit PGM plus JSON sidecar");
  ren->add_option("--input", rd.input, "Dataset or predictions (.pdds)")->required();
  ren->add_option("--index", rd.index, "Record index")->capture_default_str();
  ren->add_option("--channel", rd.channel, "u or f")->capture_default_str();
  ren->add_option("--out", rd.out, "Output prefix; writes <out>.pgm and <out>.json")->required();

  std::string manifest, replay_dir;
  auto* rep = app.add_subcommand("replay", "Re-run a command from its manifest");
  rep->add_option("--manifest", manifest, "Manifest JSON")->required();
  rep->add_option("--out-dir", replay_dir, "Write outputs here instead of the recorded location");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*gen) return cmd_gen_data(g, out);
  if (*run) return cmd_run(r, out);
  if (*ver) return cmd_verify(v, out);
  if (*ren) return cmd_render(rd, out);
  return cmd_replay(manifest, replay_dir, out, err, depth);
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err, 0);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DimensionError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace pddrm
