#include "mwem/mwem.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "mwem/primitives.hpp"
#include "mwem/sim.hpp"

namespace mwem {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ring_t pack_double(double v) { return std::bit_cast<ring_t>(v); }
double unpack_double(ring_t v) { return std::bit_cast<double>(v); }

}  // namespace

void MwemConfig::validate() const {
  budget.validate();
  if (num_queries < 1) {
    throw std::invalid_argument("config: need at least one query");
  }
  if (frac_bits < 8 || frac_bits > 24) {
    throw std::invalid_argument("config: frac_bits out of supported range");
  }
}

RunResult run_mwem_central(const MwemConfig& config, const Histogram& data,
                           const HistogramDomain& domain,
                           const QueryWorkload& workload) {
  config.validate();
  if (data.counts.size() != domain.cell_count()) {
    throw std::invalid_argument("run_mwem_central: histogram/domain mismatch");
  }
  const auto t0 = Clock::now();
  RunResult result;

  const double n = data.total();
  const std::size_t nq = workload.size();
  std::vector<double> true_answers(nq);
  for (std::size_t i = 0; i < nq; i++) {
    true_answers[i] = eval_query(workload[i], data.counts);
  }

  std::unique_ptr<JointRandom> rnd;
  if (config.tape_seed) {
    rnd = std::make_unique<TapeJointRandom>(*config.tape_seed, config.frac_bits);
  } else {
    rnd = std::make_unique<PlainJointRandom>(config.mechanism_seed);
  }

  ApproxDistribution approx = uniform_distribution(domain, n);
  std::vector<ApproxDistribution> history = {approx};
  result.timings.setup_seconds = seconds_since(t0);

  const double eps_prime = config.budget.eps_prime();
  const double b = config.budget.laplace_scale();
  std::vector<double> scores(nq);
  for (int iter = 0; iter < config.budget.iterations; iter++) {
    const auto ts = Clock::now();
    for (std::size_t i = 0; i < nq; i++) {
      scores[i] = std::fabs(eval_query(workload[i], approx.weights) -
                            true_answers[i]);
    }
    double gap = 0;
    const std::size_t k = em_select_plain(scores, eps_prime, *rnd, &gap);
    result.selection_boundary_gaps.push_back(gap);
    result.timings.select_seconds += seconds_since(ts);

    const auto tm = Clock::now();
    const double m = laplace_plain(true_answers[k - 1], b, *rnd);
    result.timings.measure_seconds += seconds_since(tm);

    const auto tu = Clock::now();
    mw_update(approx, workload[k - 1], m);
    history.push_back(approx);
    result.timings.update_seconds += seconds_since(tu);
    result.iterations.push_back({k, m});
  }

  result.output = average_distributions(history, config.literal_averaging);
  result.timings.total_seconds = seconds_since(t0);
  return result;
}

void run_mwem_party(PartyEngine& engine, const HistogramDomain& domain,
                    const std::vector<RepShare>& shared_histogram) {
  Transport& t = engine.transport();
  if (shared_histogram.size() != domain.cell_count()) {
    throw std::invalid_argument("run_mwem_party: share/domain mismatch");
  }

  Frame cfg = t.recv(kCoordinatorId, MsgType::Data, 1);
  if (cfg.payload.size() < 8 ||
      cfg.payload[0] != ring_t(CoordCommand::Configure)) {
    throw ProtocolError("party: expected configuration command");
  }
  const int iterations = int(cfg.payload[1]);
  const std::size_t nq = std::size_t(cfg.payload[2]);
  const double epsilon = unpack_double(cfg.payload[3]);
  const std::uint64_t workload_seed = cfg.payload[4];
  const int frac_bits = int(cfg.payload[5]);
  if (frac_bits != engine.codec().frac_bits) {
    throw ProtocolError("party: coordinator codec mismatch");
  }
  if (cfg.payload[6] != 0) {
    // Pinned tape: party 0 replays the tape, the others go silent.
    const std::uint64_t tape_seed = cfg.payload[7];
    if (engine.id() == 0) {
      engine.set_joint_bits(std::make_unique<PrngBits>(tape_seed));
    } else {
      engine.set_joint_bits(std::make_unique<ZeroBits>());
    }
  }
  PrivacyBudget budget{epsilon, iterations};
  budget.validate();

  // One-time evaluation of every query over the encrypted data.
  const QueryWorkload workload = gen_workload(domain, nq, workload_seed);
  std::vector<RepShare> shared_answers(nq);
  for (std::size_t i = 0; i < nq; i++) {
    shared_answers[i] = eval_query_shared(workload[i], shared_histogram);
  }

  const double eps_prime = budget.eps_prime();
  const double b = budget.laplace_scale();
  std::vector<double> approx_answers(nq);
  for (int iter = 1; iter <= iterations; iter++) {
    const std::uint64_t round = 2 * std::uint64_t(iter);
    Frame step = t.recv(kCoordinatorId, MsgType::Data, round);
    if (step.payload.size() != 2 + nq ||
        step.payload[0] != ring_t(CoordCommand::Iterate)) {
      throw ProtocolError("party: expected iteration command");
    }
    for (std::size_t i = 0; i < nq; i++) {
      approx_answers[i] = unpack_double(step.payload[2 + i]);
    }

    const std::size_t k =
        em_select_mpc(engine, shared_answers, approx_answers, eps_prime);
    Frame pick;
    pick.type = MsgType::OpenBroadcast;
    pick.round = round;
    pick.payload = {ring_t(k)};
    t.send(kCoordinatorId, std::move(pick));

    const double m = laplace_measure_mpc(engine, shared_answers[k - 1], b);
    Frame meas;
    meas.type = MsgType::OpenBroadcast;
    meas.round = round + 1;
    meas.payload = {pack_double(m)};
    t.send(kCoordinatorId, std::move(meas));
  }

  Frame done = t.recv(kCoordinatorId, MsgType::Data,
                      2 * std::uint64_t(iterations) + 2);
  if (done.payload.empty() || done.payload[0] != ring_t(CoordCommand::Done)) {
    throw ProtocolError("party: expected completion command");
  }
}

RunResult run_mwem_coordinator(Transport& transport, const MwemConfig& config,
                               const HistogramDomain& domain,
                               const QueryWorkload& workload,
                               double total_records) {
  config.validate();
  if (workload.size() != config.num_queries) {
    throw std::invalid_argument("coordinator: workload size mismatch");
  }
  if (!(total_records > 0)) {
    throw std::invalid_argument("coordinator: total record count required");
  }
  const auto t0 = Clock::now();
  RunResult result;

  Frame cfg;
  cfg.round = 1;
  cfg.payload = {ring_t(CoordCommand::Configure),
                 ring_t(config.budget.iterations),
                 ring_t(config.num_queries),
                 pack_double(config.budget.epsilon),
                 config.workload_seed,
                 ring_t(config.frac_bits),
                 config.tape_seed ? ring_t(1) : ring_t(0),
                 config.tape_seed.value_or(0)};
  for (int p = 0; p < kNumParties; p++) transport.send(p, cfg);

  ApproxDistribution approx = uniform_distribution(domain, total_records);
  std::vector<ApproxDistribution> history = {approx};
  result.timings.setup_seconds = seconds_since(t0);

  for (int iter = 1; iter <= config.budget.iterations; iter++) {
    const std::uint64_t round = 2 * std::uint64_t(iter);
    const auto ts = Clock::now();

    Frame step;
    step.round = round;
    step.payload.reserve(2 + workload.size());
    step.payload = {ring_t(CoordCommand::Iterate), ring_t(iter)};
    for (const LinearQuery& q : workload) {
      step.payload.push_back(pack_double(eval_query(q, approx.weights)));
    }
    for (int p = 0; p < kNumParties; p++) transport.send(p, step);

    std::size_t k = 0;
    for (int p = 0; p < kNumParties; p++) {
      Frame pick = transport.recv(p, MsgType::OpenBroadcast, round);
      if (pick.payload.size() != 1) {
        throw ProtocolError("coordinator: malformed index report");
      }
      const std::size_t kp = std::size_t(pick.payload[0]);
      if (p == 0) {
        k = kp;
      } else if (kp != k) {
        throw ProtocolError("coordinator: parties disagree on the index");
      }
    }
    if (k < 1 || k > workload.size()) {
      throw ProtocolError("coordinator: selected index out of range");
    }
    result.timings.select_seconds += seconds_since(ts);

    const auto tm = Clock::now();
    double m = 0;
    for (int p = 0; p < kNumParties; p++) {
      Frame meas = transport.recv(p, MsgType::OpenBroadcast, round + 1);
      if (meas.payload.size() != 1) {
        throw ProtocolError("coordinator: malformed measurement report");
      }
      const double mp = unpack_double(meas.payload[0]);
      if (p == 0) {
        m = mp;
      } else if (mp != m) {
        throw ProtocolError("coordinator: parties disagree on the measurement");
      }
    }
    result.timings.measure_seconds += seconds_since(tm);

    const auto tu = Clock::now();
    mw_update(approx, workload[k - 1], m);
    history.push_back(approx);
    result.timings.update_seconds += seconds_since(tu);
    result.iterations.push_back({k, m});
  }

  Frame done;
  done.round = 2 * std::uint64_t(config.budget.iterations) + 2;
  done.payload = {ring_t(CoordCommand::Done)};
  for (int p = 0; p < kNumParties; p++) transport.send(p, done);

  result.output = average_distributions(history, config.literal_averaging);
  result.timings.total_seconds = seconds_since(t0);
  return result;
}

RunResult run_mwem_distributed_sim(
    const MwemConfig& config, const Histogram& data,
    const HistogramDomain& domain, const QueryWorkload& workload,
    std::vector<std::vector<OpenRecord>>* open_logs) {
  config.validate();
  const FixedCodec codec{config.frac_bits};

  // The data-holder role: encode and deal replicated shares of the cells.
  std::mt19937_64 dealer(config.mechanism_seed ^ 0x5ca77e12d5eedULL);
  std::array<std::vector<RepShare>, 3> cell_shares;
  for (double count : data.counts) {
    const auto s = make_shares(codec.encode(count), dealer);
    for (int p = 0; p < 3; p++) cell_shares[p].push_back(s[p]);
  }

  const double n = data.total();
  RunResult result;
  if (open_logs) open_logs->assign(3, {});

  SimOptions opts;
  opts.codec = codec;
  opts.seed = config.mechanism_seed;
  sim_parties_with(
      opts,
      [&](PartyEngine& e) {
        run_mwem_party(e, domain, cell_shares[e.id()]);
        if (open_logs) (*open_logs)[e.id()] = e.open_log();
        return 0;
      },
      [&](Transport& t) {
        result = run_mwem_coordinator(t, config, domain, workload, n);
      });
  return result;
}

}  // namespace mwem
