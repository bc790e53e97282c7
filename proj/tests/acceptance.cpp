// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 8 drives the CLI binary passed as argv[1].

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dlu/pipeline.hpp"
#include "dlu/synthetic.hpp"
#include "oracles.hpp"

using namespace dlu;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail = "") {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << criterion
            << ": " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << "\n";
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a) + std::abs(b), 1e-6);
}

// ---- criterion 1: CCA oracle equivalence ---------------------------------
void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int g = 1 + static_cast<int>(rng.below(5));
    const int h = 1 + static_cast<int>(rng.below(5));
    const int p = std::max(g, h) + 2 + static_cast<int>(rng.below(46));
    const int k = std::min(g, h);
    const Eigen::MatrixXd u1 = oracle::random_matrix(rng, g, p);
    const Eigen::MatrixXd u2 = oracle::random_matrix(rng, h, p);
    CcaConfig cfg;
    cfg.reg_r = 1e-4;
    cfg.num_components_k = k;
    const CcaSolution sol = fit_cca(u1, u2, cfg);
    const Eigen::VectorXd ref = oracle::cca_correlations(u1, u2, cfg.reg_r, k);
    for (int i = 0; i < k; ++i)
      worst = std::max(worst, std::abs(sol.correlations[i] - ref[i]));
  }
  const double elapsed = seconds_since(start);
  report(1, "CCA oracle equivalence", worst < 1e-6 && elapsed < 5.0,
         "max deviation " + std::to_string(worst) + ", " +
             std::to_string(elapsed) + " s");
}

// ---- criterion 2: gradient checks ----------------------------------------
void criterion_2() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(102);
  const double eps = 1e-5;
  double worst_obj = 0.0;

  for (int trial = 0; trial < 20; ++trial) {
    const int d1 = 2 + static_cast<int>(rng.below(3));
    const int d2 = 2 + static_cast<int>(rng.below(3));
    const int m = 25 + static_cast<int>(rng.below(16));
    Eigen::MatrixXd h1 = oracle::random_matrix(rng, d1, m);
    Eigen::MatrixXd h2 = oracle::random_matrix(rng, d2, m);
    CcaConfig cfg;
    cfg.reg_r = 1e-3;
    cfg.num_components_k = std::min(d1, d2);
    const CorrGrad cg = corr_objective_grad(h1, h2, cfg);
    for (Eigen::Index r = 0; r < d1; ++r) {
      for (Eigen::Index c = 0; c < m; ++c) {
        Eigen::MatrixXd hp = h1, hm = h1;
        hp(r, c) += eps;
        hm(r, c) -= eps;
        const double fd = (corr_objective_grad(hp, h2, cfg).objective -
                           corr_objective_grad(hm, h2, cfg).objective) /
                          (2 * eps);
        worst_obj = std::max(worst_obj, rel_err(cg.grad1(r, c), fd));
      }
    }
  }
  const bool direct_ok = worst_obj < 1e-4;

  // end-to-end parameter gradients through small tanh networks
  double worst_net = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    NetworkSpec s1, s2;
    s1.input_dim = 3;
    s2.input_dim = 4;
    s1.hidden_widths = s2.hidden_widths = {5};
    s1.output_dim = s2.output_dim = 2;
    DccaModel model = init_model(s1, s2, 70 + trial);
    const Eigen::MatrixXd x1 = oracle::random_matrix(rng, 3, 30);
    const Eigen::MatrixXd x2 = oracle::random_matrix(rng, 4, 30);
    CcaConfig cfg;
    cfg.reg_r = 1e-3;
    cfg.num_components_k = 2;

    auto objective = [&]() {
      return corr_objective_grad(forward(model.net1, x1), forward(model.net2, x2),
                                 cfg)
          .objective;
    };
    ForwardCache c1, c2;
    const Eigen::MatrixXd o1 = forward(model.net1, x1, &c1);
    const Eigen::MatrixXd o2 = forward(model.net2, x2, &c2);
    const CorrGrad cg = corr_objective_grad(o1, o2, cfg);
    const NetGrads g1 = backward(model.net1, c1, cg.grad1);
    const NetGrads g2 = backward(model.net2, c2, cg.grad2);

    auto probe = [&](Network& net, const NetGrads& grads) {
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Eigen::MatrixXd& w = net.layers[l].weights;
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
          for (Eigen::Index c = 0; c < w.cols(); ++c) {
            const double saved = w(r, c);
            w(r, c) = saved + eps;
            const double up = objective();
            w(r, c) = saved - eps;
            const double down = objective();
            w(r, c) = saved;
            worst_net = std::max(
                worst_net, rel_err(grads.d_weights[l](r, c), (up - down) / (2 * eps)));
          }
        }
      }
    };
    probe(model.net1, g1);
    probe(model.net2, g2);
  }
  const double elapsed = seconds_since(start);
  report(2, "gradient checks",
         direct_ok && worst_net < 1e-3 && elapsed < 30.0,
         "direct " + std::to_string(worst_obj) + ", end-to-end " +
             std::to_string(worst_net) + ", " + std::to_string(elapsed) + " s");
}

// ---- criterion 3: linear-mode equivalence --------------------------------
void criterion_3() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(103);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int g = 2 + static_cast<int>(rng.below(3));
    const int p = 20 + static_cast<int>(rng.below(21));
    const Eigen::MatrixXd v1 = oracle::random_matrix(rng, g, p);
    const Eigen::MatrixXd v2 = oracle::random_matrix(rng, g, p);
    NetworkSpec spec;
    spec.input_dim = g;
    spec.output_dim = g;
    spec.activation = Activation::Identity;
    TrainConfig tc;
    tc.max_iters = 300;
    tc.seed = 200 + trial;
    tc.cca.reg_r = 0.0;
    tc.cca.num_components_k = g;
    UtteranceMatrix u1, u2;
    u1.rows = v1;
    u2.rows = v2;
    const DccaModel model = train(u1, u2, spec, spec, tc);
    const CcaSolution closed = fit_cca(v1, v2, tc.cca);
    worst = std::max(worst,
                     std::abs(model.cca_on_outputs.objective - closed.objective));
  }
  const double elapsed = seconds_since(start);
  report(3, "linear-mode equivalence", worst < 1e-3 && elapsed < 60.0,
         "max objective gap " + std::to_string(worst) + ", " +
             std::to_string(elapsed) + " s");
}

// ---- criterion 4: CCA invariance suite -----------------------------------
void criterion_4() {
  Rng rng(104);
  bool ok = true;
  for (int trial = 0; trial < 10; ++trial) {
    const int g = 2 + static_cast<int>(rng.below(3));
    const int h = 2 + static_cast<int>(rng.below(3));
    const int p = 30 + static_cast<int>(rng.below(21));
    const int k = std::min(g, h);
    const Eigen::MatrixXd u1 = oracle::random_matrix(rng, g, p);
    const Eigen::MatrixXd u2 = oracle::random_matrix(rng, h, p);
    CcaConfig cfg;
    cfg.reg_r = 0.0;
    cfg.num_components_k = k;
    const CcaSolution base = fit_cca(u1, u2, cfg);

    const Eigen::MatrixXd l = oracle::random_matrix(rng, g, g) +
                              3.0 * Eigen::MatrixXd::Identity(g, g);
    const CcaSolution mixed = fit_cca(l * u1, u2, cfg);
    if ((mixed.correlations - base.correlations).cwiseAbs().maxCoeff() >= 1e-6)
      ok = false;

    const CcaSolution swapped = fit_cca(u2, u1, cfg);
    if ((swapped.correlations - base.correlations).cwiseAbs().maxCoeff() >= 1e-8)
      ok = false;
  }
  report(4, "CCA invariance suite", ok);
}

// ---- criterion 5: Algorithm-1 fixpoint and dedup -------------------------
void criterion_5() {
  Rng rng(105);
  bool ok = true;

  auto dedup_holds = [](const DiscourseState& s) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i)
      for (std::size_t j = i + 1; j < s.tokens.size(); ++j) {
        const double c = std::abs(s.tokens[i].vector.dot(s.tokens[j].vector)) /
                         (s.tokens[i].vector.norm() * s.tokens[j].vector.norm());
        if (c >= s.dedup_tau) return false;
      }
    return true;
  };

  // fixpoint on three identical utterances
  for (int trial = 0; trial < 5; ++trial) {
    UtteranceMatrix utt;
    utt.rows = oracle::random_matrix(rng, 2 + static_cast<int>(rng.below(3)), 12);
    DiscourseConfig cfg;
    const auto two = build_discourse({utt, utt}, cfg);
    const auto three = build_discourse({utt, utt, utt}, cfg);
    if (three.tokens.size() != two.tokens.size()) ok = false;
    if (!dedup_holds(three)) ok = false;
  }

  // 1,000 randomized merges with the invariant checked after each
  int merges = 0;
  while (merges < 1000) {
    const int p = 6 + static_cast<int>(rng.below(11));
    UtteranceMatrix seed;
    seed.rows = oracle::random_matrix(rng, 1 + static_cast<int>(rng.below(3)), p);
    DiscourseState state = seed_state(seed, 0.9 + 0.09 * rng.uniform());
    const int steps = 5 + static_cast<int>(rng.below(6));
    for (int s = 0; s < steps; ++s, ++merges) {
      const int k = 1 + static_cast<int>(rng.below(3));
      const Eigen::MatrixXd l1 = oracle::random_matrix(rng, p, k);
      const Eigen::MatrixXd l2 = oracle::random_matrix(rng, p, k);
      Eigen::VectorXd corr(k);
      for (int i = 0; i < k; ++i) corr[i] = rng.uniform();
      state = unique_merge(state, l1, l2, corr, s + 2);
      if (!dedup_holds(state)) {
        ok = false;
        break;
      }
    }
    if (!ok) break;
  }
  report(5, "Algorithm-1 fixpoint and dedup invariant", ok,
         std::to_string(merges) + " merges");
}

// ---- criterion 6: metric oracles -----------------------------------------
void criterion_6() {
  Rng rng(106);
  bool ok = true;
  const char* vocab[] = {"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> cand, ref;
    const int cl = 1 + static_cast<int>(rng.below(9));
    const int rl = 1 + static_cast<int>(rng.below(9));
    for (int i = 0; i < cl; ++i) cand.push_back(vocab[rng.below(6)]);
    for (int i = 0; i < rl; ++i) ref.push_back(vocab[rng.below(6)]);
    if (std::abs(bleu(cand, ref) - oracle::bleu(cand, ref)) >= 1e-9) ok = false;
    if (std::abs(rouge1(cand, ref) - oracle::rouge1(cand, ref)) >= 1e-9) ok = false;
    if (std::abs(rougeL(cand, ref) - oracle::rougeL(cand, ref)) >= 1e-9) ok = false;
  }

  const std::vector<std::string> same{"one", "two", "three", "four", "five"};
  if (bleu(same, same) != 1.0) ok = false;
  if (rouge1(same, same) != 1.0) ok = false;
  if (rougeL(same, same) != 1.0) ok = false;

  for (int trial = 0; trial < 100 && ok; ++trial) {
    std::vector<RankingRecord> rankings;
    const int n = 4 + static_cast<int>(rng.below(12));
    for (int i = 0; i < 25; ++i) {
      std::vector<int> order(n);
      for (int j = 0; j < n; ++j) order[j] = j;
      rng.shuffle(order);
      rankings.push_back({i, order, static_cast<int>(rng.below(n))});
    }
    double prev = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double r = recall_at_k(rankings, k);
      if (r < prev) ok = false;
      prev = r;
    }
  }
  report(6, "metric oracles", ok);
}

// ---- criterion 7: planted-truth end-to-end -------------------------------
void criterion_7() {
  const auto start = std::chrono::steady_clock::now();
  const auto dialogues = generate_synthetic_corpus({.num_dialogues = 200, .seed = 7});
  RunConfig cfg;
  cfg.embedding_dim = 64;
  cfg.num_candidates = 10;
  cfg.ks = {1};
  const auto instances = make_instances(dialogues, cfg.num_candidates, cfg.seed);
  const auto provider = make_provider(cfg);

  std::vector<RankResult> rankings;
  for (const auto& inst : instances)
    rankings.push_back(rank_instance(inst, cfg, provider));
  const auto model_report = evaluate_pipeline(rankings, instances, cfg);
  const double model_recall = model_report.recall_at.at(1);

  // random-ranker baseline over 1,000 instances
  Rng rng(107);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<int> order(10);
    for (int j = 0; j < 10; ++j) order[j] = j;
    rng.shuffle(order);
    if (order[0] == static_cast<int>(rng.below(10))) ++hits;
  }
  const double baseline = hits / 1000.0;
  const double elapsed = seconds_since(start);

  report(7, "planted-truth end-to-end",
         model_recall >= 0.3 && baseline >= 0.07 && baseline <= 0.13 &&
             elapsed < 120.0,
         "Recall_10@1 " + std::to_string(model_recall) + ", random baseline " +
             std::to_string(baseline) + ", " + std::to_string(elapsed) + " s");
}

// ---- criterion 8: determinism through the CLI ----------------------------
int run_cli(const std::string& binary, const std::string& args) {
  const std::string cmd = binary + " " + args + " > accept_cli.log 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_8(const std::string& binary) {
  if (binary.empty()) {
    report(8, "pipeline determinism", false, "no CLI binary path given");
    return;
  }
  fs::remove_all("accept_work");
  fs::create_directories("accept_work");
  {
    std::ofstream cfg("accept_work/run.cfg");
    cfg << "corpus_path = accept_work/corpus.txt\n"
        << "corpus_format = text\n"
        << "embedding_dim = 48\n"
        << "num_candidates = 10\n"
        << "ks = 1,3,5,10\n"
        << "output_dir = accept_work/out\n"
        << "seed = 21\n";
  }
  bool ok = run_cli(binary, "gen-synthetic --out accept_work/corpus.txt "
                            "--dialogues 50 --gen-seed 3") == 0;

  const std::string dir = "accept_work/out";
  auto full_run = [&]() {
    ok = ok && run_cli(binary, "--config accept_work/run.cfg ingest") == 0;
    ok = ok && run_cli(binary, "--config accept_work/run.cfg rank --instances " +
                                   dir + "/instances.jsonl") == 0;
    ok = ok &&
         run_cli(binary, "--config accept_work/run.cfg evaluate --rankings " +
                             dir + "/rankings.jsonl --instances " + dir +
                             "/instances.jsonl") == 0;
  };
  full_run();
  const std::string instances1 = slurp(dir + "/instances.jsonl");
  const std::string rankings1 = slurp(dir + "/rankings.jsonl");
  const std::string report1 = slurp(dir + "/report.json");
  const std::string csv1 = slurp(dir + "/report.csv");
  full_run();

  ok = ok && !rankings1.empty() && !report1.empty();
  ok = ok && slurp(dir + "/instances.jsonl") == instances1;
  ok = ok && slurp(dir + "/rankings.jsonl") == rankings1;
  ok = ok && slurp(dir + "/report.json") == report1;
  ok = ok && slurp(dir + "/report.csv") == csv1;
  report(8, "pipeline determinism", ok);
}

// ---- criterion 9: recall shape over k ------------------------------------
void criterion_9() {
  const auto dialogues = generate_synthetic_corpus({.num_dialogues = 200, .seed = 7});
  RunConfig cfg;
  cfg.embedding_dim = 64;
  cfg.num_candidates = 20;
  cfg.ks = {3, 5, 10, 20};
  const auto instances = make_instances(dialogues, cfg.num_candidates, cfg.seed);
  const auto provider = make_provider(cfg);

  std::vector<RankResult> rankings;
  for (const auto& inst : instances)
    rankings.push_back(rank_instance(inst, cfg, provider));
  const auto rep = evaluate_pipeline(rankings, instances, cfg);

  const bool ok = rep.recall_at.at(3) <= rep.recall_at.at(5) &&
                  rep.recall_at.at(5) <= rep.recall_at.at(10) &&
                  rep.recall_at.at(10) <= rep.recall_at.at(20) &&
                  rep.recall_at.at(20) == 1.0;
  std::ostringstream detail;
  detail << "recall@{3,5,10,20} = " << rep.recall_at.at(3) << ", "
         << rep.recall_at.at(5) << ", " << rep.recall_at.at(10) << ", "
         << rep.recall_at.at(20);
  report(9, "recall non-decreasing in k", ok, detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  const std::string binary = argc > 1 ? argv[1] : "";
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8(binary);
  criterion_9();
  if (g_failures) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
