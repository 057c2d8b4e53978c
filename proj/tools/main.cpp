#include <CLI11.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "mwem/data_io.hpp"
#include "mwem/errors.hpp"
#include "mwem/metrics.hpp"
#include "mwem/mwem.hpp"
#include "mwem/net.hpp"

using namespace mwem;

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed ^ salt;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::chrono::milliseconds env_ms(const char* name,
                                 std::chrono::milliseconds fallback) {
  const char* v = std::getenv(name);
  if (!v) return fallback;
  return std::chrono::milliseconds(std::strtoll(v, nullptr, 10));
}

std::uint64_t read_tape_seed(const std::string& path) {
  std::ifstream in(path);
  std::uint64_t seed = 0;
  if (!in || !(in >> seed)) {
    throw FormatError("pinned tape file must hold a 64-bit seed: " + path);
  }
  return seed;
}

void write_report(const std::string& path, const std::string& mode,
                  const MwemConfig& config, double rows,
                  const RunResult& result,
                  const std::optional<WorkloadError>& werr,
                  std::optional<double> tv) {
  std::ofstream out(path);
  if (!out) {
    throw FormatError("cannot write report file: " + path);
  }
  char buf[64];
  out << "mode=" << mode << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", config.budget.epsilon);
  out << "epsilon=" << buf << "\n";
  out << "iterations=" << config.budget.iterations << "\n";
  out << "queries=" << config.num_queries << "\n";
  out << "workload_seed=" << config.workload_seed << "\n";
  out << "mechanism_seed=" << config.mechanism_seed << "\n";
  out << "frac_bits=" << config.frac_bits << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", rows);
  out << "rows=" << buf << "\n";
  out << "averaging=" << (config.literal_averaging ? "literal" : "default")
      << "\n";
  if (config.tape_seed) {
    out << "pinned_tape=" << *config.tape_seed << "\n";
  } else {
    out << "pinned_tape=none\n";
  }
  for (std::size_t i = 0; i < result.iterations.size(); i++) {
    std::snprintf(buf, sizeof(buf), "%.17g", result.iterations[i].measurement);
    out << "iteration " << (i + 1)
        << " index=" << result.iterations[i].query_number
        << " measurement=" << buf << "\n";
  }
  out << "[metrics]\n";
  if (werr) {
    std::snprintf(buf, sizeof(buf), "%.17g", werr->max_error);
    out << "max_workload_error=" << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", werr->avg_error);
    out << "avg_workload_error=" << buf << "\n";
  }
  if (tv) {
    std::snprintf(buf, sizeof(buf), "%.17g", *tv);
    out << "tv_distance=" << buf << "\n";
  }
  out << "[timings]\n";
  out << "setup_seconds=" << result.timings.setup_seconds << "\n";
  out << "select_seconds=" << result.timings.select_seconds << "\n";
  out << "measure_seconds=" << result.timings.measure_seconds << "\n";
  out << "update_seconds=" << result.timings.update_seconds << "\n";
  out << "total_seconds=" << result.timings.total_seconds << "\n";
}

struct PartyArgs {
  int id = 0;
  std::string listen;
  std::string peers;
  std::string schema_path;
  std::string inputs;
  int frac_bits = 16;
  std::uint64_t seed = 0;
  bool seeded = false;
};

int cmd_party(const PartyArgs& args) {
  const Schema schema = Schema::load(args.schema_path);
  const HistogramDomain domain = schema.domain();
  const FixedCodec codec{args.frac_bits};

  std::vector<ShareFile> files;
  for (const std::string& path : split_list(args.inputs)) {
    files.push_back(load_share_file(path));
  }
  if (files.empty()) {
    throw std::invalid_argument("party: at least one share file required");
  }
  for (const ShareFile& f : files) {
    if (f.domain_size != domain.cell_count()) {
      throw FormatError("share file domain size " +
                        std::to_string(f.domain_size) +
                        " does not match schema domain " +
                        std::to_string(domain.cell_count()));
    }
  }
  const std::vector<RepShare> cells =
      aggregate_share_files(files, args.id, codec);

  auto addrs = split_list(args.peers);
  if (addrs.size() != 3) {
    throw std::invalid_argument("party: --peers needs three addresses");
  }
  const std::array<std::string, 3> party_addrs = {addrs[0], addrs[1], addrs[2]};

  const std::uint64_t seed =
      args.seeded ? mix_seed(args.seed, 0x70617274ULL + args.id)
                  : std::random_device{}();

  TcpTransport transport(
      args.id, args.listen, party_addrs, /*expect_coordinator=*/true,
      env_ms("MWEM_DIAL_TIMEOUT_MS", std::chrono::milliseconds(20000)));
  transport.recv_timeout =
      env_ms("MWEM_RECV_TIMEOUT_MS", std::chrono::milliseconds(60000));
  PartyEngine engine(args.id, transport, codec, seed);
  run_mwem_party(engine, domain, cells);
  std::fprintf(stderr, "party %d: run complete\n", args.id);
  return 0;
}

struct ShareArgs {
  std::string input;
  std::string schema_path;
  std::string out_dir;
  std::uint64_t holder = 0;
  int frac_bits = 16;
  std::uint64_t seed = 0;
  bool seeded = false;
};

int cmd_share(const ShareArgs& args) {
  const Schema schema = Schema::load(args.schema_path);
  const HistogramDomain domain = schema.domain();
  const RecordTable table = load_csv(args.input, schema);
  const Histogram hist = build_histogram(table, domain);
  const FixedCodec codec{args.frac_bits};

  std::mt19937_64 rng(args.seeded ? mix_seed(args.seed, 0x73686172ULL)
                                  : std::random_device{}());
  const auto files = share_histogram(hist, codec, args.holder, rng);
  for (int p = 0; p < 3; p++) {
    const std::string path = args.out_dir + "/holder" +
                             std::to_string(args.holder) + ".party" +
                             std::to_string(p) + ".share";
    write_share_file(path, files[p]);
    std::printf("%s\n", path.c_str());
  }
  std::fprintf(stderr, "shared %zu rows over %zu cells for holder %llu\n",
               table.rows.size(), domain.cell_count(),
               (unsigned long long)args.holder);
  return 0;
}

struct SynthArgs {
  std::string mode = "central";
  std::string input;
  std::string schema_path;
  std::string parties;
  std::string out;
  std::string report;
  double rows = 0;
  double epsilon = 1.0;
  int iterations = 10;
  std::size_t queries = 400;
  std::uint64_t seed = 1;
  int frac_bits = 16;
  bool literal_averaging = false;
  std::string tape_path;
};

int cmd_synthesize(const SynthArgs& args) {
  if (args.mode != "central" && args.mode != "mpc") {
    throw std::invalid_argument("synthesize: --mode must be central or mpc");
  }
  const Schema schema = Schema::load(args.schema_path);
  const HistogramDomain domain = schema.domain();

  MwemConfig config;
  config.budget = {args.epsilon, args.iterations};
  config.num_queries = args.queries;
  config.workload_seed = args.seed;
  config.mechanism_seed = mix_seed(args.seed, 0x6d656368ULL);
  config.frac_bits = args.frac_bits;
  config.literal_averaging = args.literal_averaging;
  if (!args.tape_path.empty()) {
    config.tape_seed = read_tape_seed(args.tape_path);
    std::fprintf(stderr,
                 "warning: pinned tape active, output is NOT differentially "
                 "private\n");
  }
  config.validate();

  const QueryWorkload workload =
      gen_workload(domain, config.num_queries, config.workload_seed);

  RunResult result;
  double n = 0;
  std::optional<WorkloadError> werr;
  std::optional<double> tv;
  if (args.mode == "central") {
    if (args.input.empty()) {
      throw std::invalid_argument("synthesize central: --input required");
    }
    const RecordTable table = load_csv(args.input, schema);
    const Histogram hist = build_histogram(table, domain);
    n = hist.total();
    if (n <= 0) {
      throw std::invalid_argument("synthesize: input dataset is empty");
    }
    result = run_mwem_central(config, hist, domain, workload);
    werr = workload_error(hist.counts, result.output.weights, workload);
    tv = tv_distance(hist.counts, result.output.weights);
  } else {
    auto addrs = split_list(args.parties);
    if (addrs.size() != 3) {
      throw std::invalid_argument("synthesize mpc: --parties needs three addresses");
    }
    if (!(args.rows > 0)) {
      throw std::invalid_argument(
          "synthesize mpc: --rows (public record count) required");
    }
    n = args.rows;
    const std::array<std::string, 3> party_addrs = {addrs[0], addrs[1],
                                                    addrs[2]};
    TcpTransport transport(
        kCoordinatorId, "", party_addrs, /*expect_coordinator=*/false,
        env_ms("MWEM_DIAL_TIMEOUT_MS", std::chrono::milliseconds(20000)));
    transport.recv_timeout =
        env_ms("MWEM_RECV_TIMEOUT_MS", std::chrono::milliseconds(60000));
    result = run_mwem_coordinator(transport, config, domain, workload, n);
  }

  const RecordTable synth = sample_synthetic(
      result.output, domain, std::size_t(std::llround(n)),
      mix_seed(args.seed, 0x73616d70ULL));
  write_csv(args.out, synth, schema);

  const std::string report_path =
      args.report.empty() ? args.out + ".report" : args.report;
  write_report(report_path, args.mode, config, n, result, werr, tv);
  std::fprintf(stderr, "synthesized %zu rows -> %s (report %s)\n",
               synth.rows.size(), args.out.c_str(), report_path.c_str());
  return 0;
}

struct EvalArgs {
  std::string real;
  std::string synth;
  std::string schema_path;
  std::size_t queries = 400;
  std::uint64_t seed = 1;
  double l2 = 0.0;
  std::string positive;
  std::string out;
};

int cmd_evaluate(const EvalArgs& args) {
  const Schema schema = Schema::load(args.schema_path);
  const HistogramDomain domain = schema.domain();
  const RecordTable real = load_csv(args.real, schema);
  const RecordTable synth = load_csv(args.synth, schema);
  const Histogram real_hist = build_histogram(real, domain);
  const Histogram synth_hist = build_histogram(synth, domain);

  const QueryWorkload workload = gen_workload(domain, args.queries, args.seed);
  const WorkloadError werr =
      workload_error(real_hist.counts, synth_hist.counts, workload);
  const double tv = tv_distance(real_hist.counts, synth_hist.counts);

  std::ostringstream report;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", werr.max_error);
  report << "max_workload_error=" << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", werr.avg_error);
  report << "avg_workload_error=" << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", tv);
  report << "tv_distance=" << buf << "\n";

  if (const auto label = schema.label_column()) {
    std::optional<std::size_t> positive;
    if (!args.positive.empty()) {
      positive = schema.category_index(*label, args.positive);
    }
    LrConfig lr;
    lr.l2 = args.l2;
    const auto train_labels = binary_labels(synth, *label, positive);
    const auto test_labels = binary_labels(real, *label, positive);
    const LrModel model =
        train_logistic(synth, domain, *label, train_labels, lr);
    const auto scores = lr_scores(model, real, domain, *label);
    std::snprintf(buf, sizeof(buf), "%.17g", auc_roc(scores, test_labels));
    report << "auc_roc=" << buf << "\n";
  }

  if (args.out.empty()) {
    std::cout << report.str();
  } else {
    std::ofstream out(args.out);
    if (!out) {
      throw FormatError("cannot write report file: " + args.out);
    }
    out << report.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private synthetic tabular data from secret-shared histograms"};
  app.require_subcommand(1);

  PartyArgs party;
  auto* party_cmd =
      app.add_subcommand("party", "Run one long-lived computing party");
  party_cmd->add_option("--id", party.id, "Party id (0, 1 or 2)")
      ->required()
      ->check(CLI::Range(0, 2));
  party_cmd->add_option("--listen", party.listen, "Listen address host:port")
      ->required();
  party_cmd
      ->add_option("--peers", party.peers,
                   "Comma-separated listen addresses of parties 0,1,2")
      ->required();
  party_cmd->add_option("--schema", party.schema_path, "Schema sidecar file")
      ->required();
  party_cmd
      ->add_option("--input", party.inputs,
                   "Comma-separated share files for this party, one per holder")
      ->required();
  party_cmd->add_option("--frac-bits", party.frac_bits,
                        "Fixed-point fractional bits");
  auto* pseed = party_cmd->add_option("--seed", party.seed,
                                      "Deterministic local randomness seed");
  party_cmd->callback([&] { party.seeded = pseed->count() > 0; });

  ShareArgs share;
  auto* share_cmd = app.add_subcommand(
      "share", "Split a local dataset into three per-party share files");
  share_cmd->add_option("--input", share.input, "Local CSV dataset")->required();
  share_cmd->add_option("--schema", share.schema_path, "Schema sidecar file")
      ->required();
  share_cmd->add_option("--out", share.out_dir, "Output directory")->required();
  share_cmd->add_option("--holder", share.holder, "Holder id")->required();
  share_cmd->add_option("--frac-bits", share.frac_bits,
                        "Fixed-point fractional bits");
  auto* sseed =
      share_cmd->add_option("--seed", share.seed, "Deterministic sharing seed");
  share_cmd->callback([&] { share.seeded = sseed->count() > 0; });

  SynthArgs synth;
  auto* synth_cmd =
      app.add_subcommand("synthesize", "Generate a synthetic dataset");
  synth_cmd->add_option("--mode", synth.mode, "central or mpc")->required();
  synth_cmd->add_option("--input", synth.input,
                        "CSV dataset (central mode only)");
  synth_cmd->add_option("--schema", synth.schema_path, "Schema sidecar file")
      ->required();
  synth_cmd->add_option("--parties", synth.parties,
                        "Comma-separated party addresses (mpc mode)");
  synth_cmd->add_option("--rows", synth.rows,
                        "Public total record count n (mpc mode)");
  synth_cmd->add_option("--epsilon", synth.epsilon, "Total privacy budget")
      ->required();
  synth_cmd->add_option("--iterations", synth.iterations, "MWEM iterations T")
      ->required();
  synth_cmd->add_option("--queries", synth.queries, "Workload size N");
  synth_cmd->add_option("--seed", synth.seed, "Run seed");
  synth_cmd->add_option("--frac-bits", synth.frac_bits,
                        "Fixed-point fractional bits");
  synth_cmd->add_flag("--literal-averaging", synth.literal_averaging,
                      "Average A_0..A_{T-1} instead of A_1..A_T");
  synth_cmd->add_option("--out", synth.out, "Synthetic CSV output path")
      ->required();
  synth_cmd->add_option("--report", synth.report,
                        "Report path (default <out>.report)");
#ifdef MWEM_ENABLE_PINNED_TAPE
  synth_cmd->add_option(
      "--pinned-tape", synth.tape_path,
      "Tape seed file: deterministic joint randomness (voids DP; test builds)");
#endif

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "Score a synthetic dataset against real data");
  eval_cmd->add_option("--real", eval.real, "Real CSV dataset")->required();
  eval_cmd->add_option("--synth", eval.synth, "Synthetic CSV dataset")
      ->required();
  eval_cmd->add_option("--schema", eval.schema_path, "Schema sidecar file")
      ->required();
  eval_cmd->add_option("--queries", eval.queries, "Workload size N");
  eval_cmd->add_option("--seed", eval.seed, "Workload seed");
  eval_cmd->add_option("--l2", eval.l2, "Optional L2 regularization strength");
  eval_cmd->add_option("--positive", eval.positive,
                       "Positive label category (default: any non-first)");
  eval_cmd->add_option("--out", eval.out, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
    if (party_cmd->parsed()) return cmd_party(party);
    if (share_cmd->parsed()) return cmd_share(share);
    if (synth_cmd->parsed()) return cmd_synthesize(synth);
    if (eval_cmd->parsed()) return cmd_evaluate(eval);
    return 1;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "argument error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 1;
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
