#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "franson/oracle.hpp"
#include "franson/rng.hpp"
#include "franson/source.hpp"

using namespace franson;

TEST_CASE("pair detunings are anti-correlated") {
  CHECK(pair_detunings(0.0) == std::pair<double, double>{0.0, 0.0});
  CHECK(pair_detunings(1e8) == std::pair<double, double>{+1e8, -1e8});
  CHECK(pair_detunings(1e9) == std::pair<double, double>{+1e9, -1e9});
  CHECK_THROWS(pair_detunings(-1.0));
}

TEST_CASE("sample_detuning is nonnegative and degenerate at sigma -> 0") {
  ExperimentConfig cfg;
  cfg.f_center = 0.0;
  cfg.sigma_f = 1e9;
  CounterRng rng(3, {1});
  for (int i = 0; i < 100000; ++i) CHECK(sample_detuning(cfg, rng) >= 0.0);

  cfg.f_center = 80e6;
  cfg.sigma_f = 1e-3;  // effectively a point mass at 80 MHz
  for (int i = 0; i < 100; ++i)
    CHECK(sample_detuning(cfg, rng) == doctest::Approx(80e6).epsilon(1e-9));
}

TEST_CASE("half-normal detuning moments match the quadrature oracle") {
  ExperimentConfig cfg;
  cfg.f_center = 0.0;
  cfg.sigma_f = 1e9;
  CounterRng rng(17, {2});
  const int n = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = sample_detuning(cfg, rng);
    sum += f;
    sum2 += f * f;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const oracle::Detuning d{cfg.f_center, cfg.sigma_f};
  const double mu = oracle::detuning_mean(d);
  const double v = oracle::detuning_var(d);
  // half-normal closed form: mean = sigma * sqrt(2/pi)
  CHECK(mu == doctest::Approx(cfg.sigma_f * std::sqrt(2.0 / kPi)).epsilon(1e-6));
  CHECK(std::abs(mean - mu) < 4.0 * std::sqrt(v / n));
  CHECK(std::abs(var - v) < 0.01 * v);
}

TEST_CASE("empty and deterministic streams") {
  ExperimentConfig cfg;
  cfg.pair_rate = 0.0;
  cfg.singles_rate = 0.0;
  cfg.duration = 0.5;
  CHECK(flatten(generate_stream(cfg)).empty());

  cfg = ExperimentConfig{};
  cfg.duration = 0.05;
  cfg.seed = 99;
  const auto s1 = flatten(generate_stream(cfg, 1));
  const auto s4 = flatten(generate_stream(cfg, 4));
  REQUIRE(s1.size() == s4.size());
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1[i].t_emit == s4[i].t_emit);
    CHECK(s1[i].delta_f == s4[i].delta_f);
    CHECK(s1[i].eta == s4[i].eta);
    CHECK(s1[i].kind == s4[i].kind);
  }
}

TEST_CASE("chunks are pure functions of (config, index)") {
  ExperimentConfig cfg;
  cfg.duration = 0.01;
  cfg.seed = 5;
  const auto stream = generate_stream(cfg);
  REQUIRE(stream.size() == count_chunks(cfg));
  for (std::size_t k = 0; k < stream.size(); ++k) {
    const StreamChunk solo = generate_chunk(cfg, k);
    CHECK(solo.t_start == stream[k].t_start);
    REQUIRE(solo.events.size() == stream[k].events.size());
    for (std::size_t i = 0; i < solo.events.size(); ++i)
      CHECK(solo.events[i].t_emit == stream[k].events[i].t_emit);
  }
}

TEST_CASE("stream chunk invariants") {
  ExperimentConfig cfg;
  cfg.duration = 0.02;
  cfg.seed = 12;
  for (const auto& ch : generate_stream(cfg)) {
    double prev = ch.t_start;
    for (const auto& ev : ch.events) {
      CHECK(ev.t_emit >= prev);
      CHECK(ev.t_emit >= ch.t_start);
      CHECK(ev.t_emit < ch.t_end);
      prev = ev.t_emit;
      if (ev.kind == EventKind::Pair) CHECK(ev.delta_f >= 0.0);
      CHECK(ev.eta >= 0.0);
      CHECK(ev.eta < kTwoPi);
    }
  }
}

TEST_CASE("pair counts are poissonian") {
  ExperimentConfig cfg;
  cfg.singles_rate = 0.0;
  cfg.pair_rate = 1e4;
  cfg.duration = 10.0;
  cfg.seed = 31;
  const auto events = flatten(generate_stream(cfg, 2));
  const double n = static_cast<double>(events.size());
  const double lambda = cfg.pair_rate * cfg.duration;
  CHECK(std::abs(n - lambda) < 4.0 * std::sqrt(lambda));
}

TEST_CASE("pair inter-arrival times pass a KS test against the exponential") {
  ExperimentConfig cfg;
  cfg.singles_rate = 0.0;
  cfg.pair_rate = 1e4;
  cfg.duration = 10.0;
  cfg.seed = 8;
  const auto events = flatten(generate_stream(cfg));
  std::vector<double> gaps;
  for (std::size_t i = 1; i < events.size(); ++i)
    gaps.push_back(events[i].t_emit - events[i - 1].t_emit);
  std::sort(gaps.begin(), gaps.end());
  const double n = static_cast<double>(gaps.size());
  double d_stat = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const double cdf = 1.0 - std::exp(-cfg.pair_rate * gaps[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d_stat = std::max({d_stat, std::abs(cdf - lo), std::abs(hi - cdf)});
  }
  CHECK(d_stat < oracle::ks_critical(gaps.size()));
}

TEST_CASE("events csv dump") {
  ExperimentConfig cfg;
  cfg.duration = 0.002;
  cfg.singles_rate = 1e4;
  cfg.pair_rate = 1e4;
  const auto stream = generate_stream(cfg);
  const std::string path = "test_events_dump.csv";
  write_events_csv(path, stream);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t_emit_ps,kind,delta_f_hz,eta_rad");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == flatten(stream).size());
  in.close();
  std::remove(path.c_str());
}
