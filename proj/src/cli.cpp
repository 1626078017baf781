#include "citegrowth/cli.hpp"

#include <chrono>
#include <climits>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "citegrowth/digest.hpp"
#include "citegrowth/evaluation.hpp"
#include "citegrowth/ingest.hpp"
#include "citegrowth/simulation.hpp"
#include "citegrowth/theory.hpp"
#include "citegrowth/trajectory.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace citegrowth::cli {

namespace {

struct DataOptions {
  std::string input;
  std::string papers;
  std::string citations;
  long synthetic_nodes = 0;
  int seed_start = 1960;
  int seed_end = 1975;
  int cutoff = 2000;
  int horizon = 2010;
  CLI::Option* cutoff_opt = nullptr;
  CLI::Option* horizon_opt = nullptr;
};

struct ModelOptions {
  std::string config;
  std::string model;
  std::string gamma_regime;
  std::string gamma_const;
  std::string sigma;
  std::string rho;
  std::string shift_unit;
  std::string shift_every;
  std::string alpha;
  std::string xm;
  std::string dim;
  std::string degree;
};

struct ClassifierOptions {
  std::string activation = "5";
  std::string peak_threshold = "0.75";
};

/// Tracks files read and written for the manifest; all writes stay in `out`.
class RunContext {
public:
  explicit RunContext(fs::path out) : out_(std::move(out)) {
    if (out_.empty())
      throw std::invalid_argument("--out is required");
    fs::create_directories(out_);
  }

  void read(const fs::path& p) { inputs_.push_back(p); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(out_ / name, std::ios::binary);
    if (!f)
      throw InputError("cannot write " + (out_ / name).string());
    f << content;
    outputs_.push_back(name);
  }

  json input_digests() const {
    json j = json::object();
    for (const auto& p : inputs_)
      j[p.string()] = sha256_file(p);
    return j;
  }

  json output_digests() const {
    json j = json::object();
    for (const auto& name : outputs_)
      j[name] = sha256_file(out_ / name);
    return j;
  }

  const fs::path& dir() const { return out_; }

private:
  fs::path out_;
  std::vector<fs::path> inputs_;
  std::vector<std::string> outputs_;
};

std::ifstream open_read(RunContext& ctx, const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot read " + path);
  ctx.read(path);
  return in;
}

std::string slurp(RunContext& ctx, const std::string& path) {
  auto in = open_read(ctx, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream ss(s);
  while (std::getline(ss, tok, ','))
    if (!tok.empty())
      out.push_back(tok);
  return out;
}

double to_double(const std::string& flag, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size())
    throw std::invalid_argument(flag + ": '" + v + "' is not a number");
  return x;
}

int to_int(const std::string& flag, const std::string& v) {
  const double x = to_double(flag, v);
  if (x != std::floor(x))
    throw std::invalid_argument(flag + ": '" + v + "' is not an integer");
  return static_cast<int>(x);
}

void add_data_options(CLI::App* sub, DataOptions& d) {
  sub->add_option("--input", d.input, "Directory produced by `ingest` (seed.graph, schedule.tsv)");
  sub->add_option("--papers", d.papers, "papers.tsv (id<TAB>year)");
  sub->add_option("--citations", d.citations, "citations.tsv (citing<TAB>cited)");
  sub->add_option("--synthetic-nodes", d.synthetic_nodes, "Generate a synthetic MAS-shaped dataset of this size");
  sub->add_option("--seed-start", d.seed_start, "First seed year");
  sub->add_option("--seed-end", d.seed_end, "Last seed year");
  d.cutoff_opt = sub->add_option("--cutoff", d.cutoff, "Last publication year classified");
  d.horizon_opt = sub->add_option("--horizon", d.horizon, "Last year of citation history");
}

void add_model_options(CLI::App* sub, ModelOptions& m, bool lists) {
  const std::string many = lists ? " (comma-separated list)" : "";
  sub->add_option("--config", m.config, "Model configuration file (key = value)");
  sub->add_option("--model", m.model, "ba|af|mf|lbm|lbm-g");
  sub->add_option("--gamma-regime", m.gamma_regime, "const|linear|sqrt|log" + many);
  sub->add_option("--gamma-const", m.gamma_const, "Gamma for the const regime");
  sub->add_option("--sigma", m.sigma, "Active subspace standard deviation" + many);
  sub->add_option("--rho", m.rho, "Subspace shift standard deviation (default: sigma)");
  sub->add_option("--shift-unit", m.shift_unit, "months|nodes");
  sub->add_option("--shift-every", m.shift_every, "Shift period S" + many);
  sub->add_option("--alpha", m.alpha, "Pareto shape of fitness");
  sub->add_option("--xm", m.xm, "Pareto scale of fitness");
  sub->add_option("--dim", m.dim, "Location space dimension");
  sub->add_option("--degree", m.degree, "in_plus_one|total");
}

/// Model from --config and/or flags; flags override config values.
ModelSpec build_model(RunContext& ctx, const ModelOptions& m) {
  std::ostringstream cfg;
  if (!m.config.empty())
    cfg << slurp(ctx, m.config) << '\n';
  if (!m.model.empty())
    cfg << "model = " << m.model << '\n';
  if (m.config.empty() && m.model.empty())
    throw std::invalid_argument("--model is required (or pass --config)");
  const std::pair<const char*, const std::string*> keys[] = {
      {"gamma_regime", &m.gamma_regime}, {"gamma_const", &m.gamma_const}, {"sigma", &m.sigma},
      {"rho", &m.rho},                   {"shift_unit", &m.shift_unit},   {"shift_every", &m.shift_every},
      {"alpha", &m.alpha},               {"xm", &m.xm},                   {"dim", &m.dim},
      {"degree", &m.degree}};
  for (const auto& [key, value] : keys)
    if (!value->empty())
      cfg << key << " = " << *value << '\n';
  std::istringstream in(cfg.str());
  try {
    return read_model_config(in);
  } catch (const InputError& e) {
    // flags and config share the parser; report flag problems as usage errors
    if (m.config.empty())
      throw std::invalid_argument(e.what());
    throw;
  }
}

ClassifierParams build_classifier(const ClassifierOptions& c) {
  ClassifierParams p;
  p.activation_period = to_int("--activation", c.activation);
  p.peak_threshold = to_double("--peak-threshold", c.peak_threshold);
  p.validate();
  return p;
}

ExperimentSetup load_setup(RunContext& ctx, DataOptions& d, std::uint64_t rng_seed) {
  const int sources = (!d.input.empty()) + (!d.papers.empty() || !d.citations.empty()) + (d.synthetic_nodes > 0);
  if (sources != 1)
    throw std::invalid_argument("pass exactly one data source: --input, --papers/--citations or --synthetic-nodes");
  ExperimentSetup setup;
  if (!d.input.empty()) {
    const auto dir = fs::path(d.input);
    auto g_in = open_read(ctx, (dir / "seed.graph").string());
    const auto seed = read_graph_dump(g_in, INT_MAX);
    for (const auto& n : seed.nodes())
      setup.seed_nodes.push_back({n.id, n.year});
    setup.seed_edges = seed.edges();
    auto s_in = open_read(ctx, (dir / "schedule.tsv").string());
    setup.schedule = read_schedule_tsv(s_in);
  } else if (d.synthetic_nodes > 0) {
    SyntheticConfig sc;
    sc.total_nodes = d.synthetic_nodes;
    sc.seed_start = d.seed_start;
    sc.seed_end = d.seed_end;
    if (d.horizon_opt->count() == 0)
      d.horizon = sc.last_year;
    sc.last_year = d.horizon;
    if (d.cutoff_opt->count() == 0)
      d.cutoff = sc.last_year - 10;
    auto r = synthetic_dataset(sc, derive_seed(rng_seed, 0xda7a));
    setup.seed_nodes = std::move(r.seed_nodes);
    setup.seed_edges = std::move(r.seed_edges);
    setup.schedule = std::move(r.schedule);
  } else {
    if (d.papers.empty() || d.citations.empty())
      throw std::invalid_argument("--papers and --citations must be given together");
    ctx.read(d.papers);
    ctx.read(d.citations);
    const auto papers = parse_papers(fs::path(d.papers));
    const auto cites = parse_citations(fs::path(d.citations), papers.records);
    IngestConfig ic{d.seed_start, d.seed_end, d.cutoff, d.horizon};
    auto r = build_seed_and_schedule(papers.records, cites.edges, ic);
    setup.seed_nodes = std::move(r.seed_nodes);
    setup.seed_edges = std::move(r.seed_edges);
    setup.schedule = std::move(r.schedule);
  }
  setup.cutoff_year = d.cutoff;
  setup.horizon_year = d.horizon;
  return setup;
}

json collect_parameters(const CLI::App* sub) {
  json params = json::object();
  for (const auto* opt : sub->get_options()) {
    const auto name = opt->get_single_name();
    if (name == "help")
      continue;
    if (opt->count() > 0) {
      std::string joined;
      for (const auto& r : opt->results())
        joined += (joined.empty() ? "" : ",") + r;
      params[name] = joined;
    } else {
      params[name] = opt->get_default_str();
    }
  }
  return params;
}

void write_manifest(RunContext& ctx, const CLI::App* sub, std::uint64_t rng_seed,
                    std::chrono::steady_clock::time_point started) {
  json m;
  m["command"] = sub->get_name();
  m["parameters"] = collect_parameters(sub);
  m["rng_seed"] = rng_seed;
  m["inputs"] = ctx.input_digests();
  m["outputs"] = ctx.output_digests();
  const std::chrono::duration<double> took = std::chrono::steady_clock::now() - started;
  m["wall_clock_seconds"] = std::round(took.count() * 1e6) / 1e6;
  std::ofstream f(ctx.dir() / "manifest.json");
  f << m.dump(2) << '\n';
}

std::string dump_graph(const GrowthGraph& g) {
  std::ostringstream ss;
  write_graph_dump(ss, g);
  return ss.str();
}

json stats_json(const SimulationStats& s) {
  return json{{"nodes_inserted", s.nodes_inserted},
              {"edges_created", s.edges_created},
              {"fallback_events", s.fallback_events},
              {"fallback_slots", s.fallback_slots},
              {"subspace_shifts", s.subspace_shifts}};
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Citation network growth models: simulate, classify trajectories, evaluate"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  std::string out_dir;
  std::uint64_t rng_seed = 1;
  DataOptions data;
  ModelOptions model;
  ClassifierOptions classifier;
  std::string graph_path, distribution_path, reference = "mas", label = "model";
  std::string activations = "3,4,5,6,7", thresholds = "0.45,0.55,0.65,0.75,0.85,0.95";
  int runs = 3, jobs = 1, trials = 50, min_size = 2, max_size = 30;
  std::string theorem_model;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->add_option("--seed", rng_seed, "RNG seed");
  };

  auto* ingest = app.add_subcommand("ingest", "Build seed network and year schedule from TSV files");
  add_common(ingest);
  add_data_options(ingest, data);

  auto* simulate = app.add_subcommand("simulate", "Grow a network under one attachment model");
  add_common(simulate);
  add_data_options(simulate, data);
  add_model_options(simulate, model, false);

  auto* classify_cmd = app.add_subcommand("classify", "Label citation trajectories of a graph dump");
  add_common(classify_cmd);
  classify_cmd->add_option("--graph", graph_path, "Graph dump")->required();
  classify_cmd->add_option("--seed-end", data.seed_end, "Nodes up to this year are seed nodes");
  classify_cmd->add_option("--cutoff", data.cutoff, "Last publication year classified");
  classify_cmd->add_option("--horizon", data.horizon, "Last year of citation history");
  classify_cmd->add_option("--activation", classifier.activation, "Activation period (years)");
  classify_cmd->add_option("--peak-threshold", classifier.peak_threshold, "Peak threshold in (0, 1]");

  auto* evaluate = app.add_subcommand("evaluate", "Squared Jensen-Shannon distance to a reference");
  add_common(evaluate);
  evaluate->add_option("--distribution", distribution_path, "distribution.json from classify")->required();
  evaluate->add_option("--reference", reference, "mas|aps|<distribution json>");
  evaluate->add_option("--label", label, "Model label for the report");

  auto* sweep_cmd = app.add_subcommand("sweep", "Grid search of model parameters against a reference");
  add_common(sweep_cmd);
  add_data_options(sweep_cmd, data);
  add_model_options(sweep_cmd, model, true);
  sweep_cmd->add_option("--reference", reference, "mas|aps|<distribution json>");
  sweep_cmd->add_option("--runs", runs, "Simulations per grid point");
  sweep_cmd->add_option("--jobs", jobs, "Parallel workers");
  sweep_cmd->add_option("--activation", classifier.activation, "Activation period (years)");
  sweep_cmd->add_option("--peak-threshold", classifier.peak_threshold, "Peak threshold in (0, 1]");

  auto* sens = app.add_subcommand("sensitivity", "Classifier sensitivity to activation period and threshold");
  add_common(sens);
  add_data_options(sens, data);
  add_model_options(sens, model, false);
  sens->add_option("--graph", graph_path, "Graph dump (instead of simulating)");
  sens->add_option("--activation", activations, "Activation periods (comma-separated)");
  sens->add_option("--peak-threshold", thresholds, "Peak thresholds (comma-separated)");

  auto* verify = app.add_subcommand("verify-theorem", "Check expected attachment-probability changes exactly");
  add_common(verify);
  verify->add_option("--model", theorem_model, "ba|af|mf")->required();
  verify->add_option("--trials", trials, "Random graphs to check");
  verify->add_option("--min-size", min_size, "Smallest graph size");
  verify->add_option("--max-size", max_size, "Largest graph size");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    RunContext ctx(out_dir);
    const CLI::App* used = app.get_subcommands().front();
    int code = kOk;

    if (used == ingest) {
      if (data.synthetic_nodes == 0 && (data.papers.empty() || data.citations.empty()))
        throw std::invalid_argument("ingest needs --papers and --citations (or --synthetic-nodes)");
      IngestResult r;
      json report;
      if (data.synthetic_nodes > 0) {
        SyntheticConfig sc;
        sc.total_nodes = data.synthetic_nodes;
        sc.seed_start = data.seed_start;
        sc.seed_end = data.seed_end;
        r = synthetic_dataset(sc, derive_seed(rng_seed, 0xda7a));
        report["source"] = "synthetic";
      } else {
        ctx.read(data.papers);
        ctx.read(data.citations);
        const auto papers = parse_papers(fs::path(data.papers));
        const auto cites = parse_citations(fs::path(data.citations), papers.records);
        r = build_seed_and_schedule(papers.records, cites.edges,
                                    IngestConfig{data.seed_start, data.seed_end, data.cutoff, data.horizon});
        report["papers_read"] = papers.records.size();
        report["papers_malformed"] = papers.malformed;
        report["citations_kept"] = cites.edges.size();
        report["citations_unknown_id"] = cites.unknown;
        report["citations_self"] = cites.self_citations;
        report["citations_duplicate"] = cites.duplicates;
        report["citations_malformed"] = cites.malformed;
        report["papers_outside_window"] = r.counters.papers_outside_window;
        report["edges_outside_window"] = r.counters.edges_outside_window;
        report["edges_forward_in_time"] = r.counters.edges_forward_in_time;
        report["edges_same_year"] = r.counters.edges_same_year;
      }
      report["seed_nodes"] = r.seed_nodes.size();
      report["seed_edges"] = r.seed_edges.size();
      report["scheduled_nodes"] = r.schedule.node_count();
      report["scheduled_edges"] = r.schedule.edge_count();
      ctx.write("seed.graph", dump_graph(seed_graph(r.seed_nodes, r.seed_edges)));
      std::ostringstream sched, ids;
      write_schedule_tsv(sched, r.schedule);
      ctx.write("schedule.tsv", sched.str());
      for (std::size_t i = 0; i < r.seed_paper_ids.size(); ++i)
        ids << i << '\t' << r.seed_paper_ids[i] << '\n';
      ctx.write("seed_ids.tsv", ids.str());
      ctx.write("ingest_report.json", report.dump(2) + "\n");
      out << "seed " << r.seed_nodes.size() << " nodes / " << r.seed_edges.size() << " edges, schedule "
          << r.schedule.node_count() << " nodes / " << r.schedule.edge_count() << " edges\n";
    } else if (used == simulate) {
      const auto spec = build_model(ctx, model);
      const auto setup = load_setup(ctx, data, rng_seed);
      SimulationStats stats;
      const auto g = simulate_run(setup, spec, rng_seed, &stats);
      ctx.write("graph.txt", dump_graph(g));
      json sim;
      sim["nodes"] = g.node_count();
      sim["edges"] = g.edge_count();
      sim["seed_nodes"] = g.seed_count();
      sim["canonical_sha256"] = g.digest();
      sim["stats"] = stats_json(stats);
      ctx.write("simulation.json", sim.dump(2) + "\n");
      std::ostringstream cfg;
      write_model_config(cfg, spec);
      ctx.write("model.cfg", cfg.str());
      out << "simulated " << g.node_count() << " nodes, " << g.edge_count() << " edges\n";
    } else if (used == classify_cmd) {
      const auto params = build_classifier(classifier);
      auto in = open_read(ctx, graph_path);
      const auto g = read_graph_dump(in, data.seed_end);
      const auto labels = classify_nodes(g, data.cutoff, data.horizon, params);
      std::ostringstream csv;
      write_classification_csv(csv, labels);
      ctx.write("classification.csv", csv.str());
      ctx.write("distribution.json",
                distribution_json(category_distribution(g, data.cutoff, data.horizon, params)) + "\n");
      out << "classified " << labels.size() << " nodes\n";
    } else if (used == evaluate) {
      const auto sim = parse_distribution_json(slurp(ctx, distribution_path));
      CategoryDistribution ref;
      if (reference == "mas")
        ref = reference_mas();
      else if (reference == "aps")
        ref = reference_aps();
      else
        ref = parse_distribution_json(slurp(ctx, reference));
      const auto report = evaluate_model(sim, ref, label);
      ctx.write("evaluation.json", eval_report_json(report) + "\n");
      out << "jsd2 " << std::fixed << std::setprecision(6) << report.jsd2 << '\n';
    } else if (used == sweep_cmd) {
      CategoryDistribution ref = reference == "mas"   ? reference_mas()
                                 : reference == "aps" ? reference_aps()
                                                      : parse_distribution_json(slurp(ctx, reference));
      // expand list-valued flags into a grid
      ModelOptions single = model;
      single.gamma_regime.clear();
      single.sigma.clear();
      single.shift_every.clear();
      const auto base = build_model(ctx, single);
      auto setup = load_setup(ctx, data, rng_seed);
      setup.classifier = build_classifier(classifier);
      std::vector<GridPoint> grid{GridPoint{{}, base}};
      auto expand = [&](const std::string& flag, const std::string& list, auto apply) {
        if (list.empty())
          return;
        std::vector<GridPoint> next;
        for (const auto& point : grid)
          for (const auto& value : split_list(list)) {
            GridPoint p = point;
            apply(p.model, value);
            p.params.emplace_back(flag, value);
            next.push_back(std::move(p));
          }
        grid = std::move(next);
      };
      auto need_location = [](const ModelSpec& m, const char* flag) {
        if (!m.location)
          throw std::invalid_argument(std::string(flag) + " needs a location model (lbm or lbm-g)");
      };
      auto need_subspace = [](const ModelSpec& m, const char* flag) {
        if (!m.subspace)
          throw std::invalid_argument(std::string(flag) + " needs the lbm-g model");
      };
      expand("gamma", model.gamma_regime, [&](ModelSpec& m, const std::string& v) {
        need_location(m, "--gamma-regime");
        m.location->gamma.kind = parse_gamma_kind(v);
      });
      expand("S", model.shift_every, [&](ModelSpec& m, const std::string& v) {
        need_subspace(m, "--shift-every");
        m.subspace->shift.every = to_int("--shift-every", v);
      });
      expand("sigma", model.sigma, [&](ModelSpec& m, const std::string& v) {
        need_subspace(m, "--sigma");
        m.subspace->sigma = to_double("--sigma", v);
        if (model.rho.empty())
          m.subspace->rho = m.subspace->sigma;
      });
      for (auto& p : grid) {
        p.model.validate();
        if (p.params.empty())
          p.params.emplace_back("model", to_string(p.model.kind));
      }
      const auto result = sweep(grid, setup, ref, SweepOptions{runs, rng_seed, jobs});
      std::ostringstream csv;
      write_sweep_csv(csv, result);
      ctx.write("sweep.csv", csv.str());
      ctx.write("sweep_summary.json", sweep_summary_json(result) + "\n");
      out << "best: " << result.best().point.label() << " jsd2 " << std::fixed << std::setprecision(6)
          << result.best().jsd2 << '\n';
    } else if (used == sens) {
      std::vector<int> acts;
      for (const auto& v : split_list(activations))
        acts.push_back(to_int("--activation", v));
      std::vector<double> ths;
      for (const auto& v : split_list(thresholds))
        ths.push_back(to_double("--peak-threshold", v));
      GrowthGraph g;
      if (!graph_path.empty()) {
        auto in = open_read(ctx, graph_path);
        g = read_graph_dump(in, data.seed_end);
      } else {
        const auto spec = build_model(ctx, model);
        const auto setup = load_setup(ctx, data, rng_seed);
        g = simulate_run(setup, spec, rng_seed);
      }
      const auto rows = sensitivity(g, data.cutoff, data.horizon, acts, ths, ClassifierParams{});
      std::ostringstream csv;
      write_sensitivity_csv(csv, rows);
      ctx.write("sensitivity.csv", csv.str());
      out << "wrote " << rows.size() << " sensitivity rows\n";
    } else if (used == verify) {
      const auto kind = parse_model_kind(theorem_model);
      const auto report = theory::verify_theorem(kind, trials, {min_size, max_size}, rng_seed);
      ctx.write("theorem.json", theory::theorem_report_json(report) + "\n");
      out << theory::theorem_report_json(report) << '\n';
      code = report.pass ? kOk : kInternal;
    }
    write_manifest(ctx, used, rng_seed, started);
    return code;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const fs::filesystem_error& e) {
    err << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

} // namespace citegrowth::cli
