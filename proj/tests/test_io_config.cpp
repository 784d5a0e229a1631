#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support.hpp"
#include "smc/config.hpp"
#include "smc/experiment.hpp"
#include "smc/filter.hpp"
#include "smc/fixtures.hpp"
#include "smc/history_io.hpp"

using namespace smc;
using testing_support::scratch_dir;
using testing_support::slurp;

TEST(HistoryIo, RoundTripInt) {
  const auto m = fixtures::two_state_hmm();
  FilterConfig c;
  c.particles = 40;
  c.sampler = Sampler::sis;
  c.resample_interval = 2;
  const auto trace = run_filter(m, fixtures::two_state_observations(), c);
  const auto path = scratch_dir("hist_int") / "h.bin";
  write_history<int>(path, trace.history());
  const auto back = read_history<int>(path);
  ASSERT_EQ(back.size(), trace.history().size());
  for (std::size_t t = 0; t < back.size(); ++t) {
    EXPECT_EQ(back[t].values(), trace.history()[t].values());
    EXPECT_EQ(back[t].weights(), trace.history()[t].weights());
    EXPECT_EQ(back[t].generation(), t);
  }
}

TEST(HistoryIo, RoundTripDoubleAndKindCheck) {
  const auto m = fixtures::linear_gaussian();
  FilterConfig c;
  c.particles = 16;
  const auto trace = run_filter(m, simulate(m, 4, 1).observations, c);
  const auto path = scratch_dir("hist_dbl") / "h.bin";
  write_history<double>(path, trace.history());
  const auto back = read_history<double>(path);
  EXPECT_EQ(back[4].values(), trace.history()[4].values());
  EXPECT_THROW(read_history<int>(path), Error);
}

TEST(HistoryIo, CorruptFiles) {
  const auto dir = scratch_dir("hist_bad");
  EXPECT_THROW(read_history<int>(dir / "missing.bin"), Error);
  {
    std::ofstream out(dir / "junk.bin", std::ios::binary);
    out << "NOPE and some more bytes to fill the header area";
  }
  EXPECT_THROW(read_history<int>(dir / "junk.bin"), Error);
  const auto m = fixtures::two_state_hmm();
  FilterConfig c;
  c.particles = 8;
  const auto trace = run_filter(m, fixtures::two_state_observations(), c);
  write_history<int>(dir / "t.bin", trace.history());
  const auto bytes = slurp(dir / "t.bin");
  {
    std::ofstream out(dir / "trunc.bin", std::ios::binary);
    out << bytes.substr(0, bytes.size() - 5);
  }
  EXPECT_THROW(read_history<int>(dir / "trunc.bin"), Error);
}

namespace {
const char* kGood = R"(# example
model.name = hmm
model.fixture = two-state
filter.N = 100
filter.scheme = tree
filter.sampler = accept-reject
experiment.T = 5
experiment.seed = 17
experiment.psi = indicator:1
experiment.mode = likelihood
experiment.replicates = 3
)";
}  // namespace

TEST(Config, ParsesGoodFile) {
  const auto r = parse_config(kGood);
  ASSERT_TRUE(r.ok()) << r.errors.front().message;
  const auto& c = *r.config;
  EXPECT_EQ(c.model.name, "hmm");
  EXPECT_EQ(*c.model.fixture, "two-state");
  EXPECT_EQ(c.filter.particles, 100u);
  EXPECT_EQ(c.filter.scheme, Scheme::tree);
  EXPECT_EQ(c.filter.sampler, Sampler::accept_reject);
  EXPECT_EQ(c.filter.seed, 17u);
  EXPECT_EQ(c.experiment.mode, Mode::likelihood);
  EXPECT_EQ(c.entries.size(), 10u);
  EXPECT_EQ(c.entries.front().first, "model.name");
}

TEST(Config, ReportsEveryErrorWithLine) {
  const char* text = R"(model.name = hmm
model.fixture = two-state
filter.N = lots
filter.colour = blue
experiment.T = 5
experiment.T = 6
this line is wrong
)";
  const auto r = parse_config(text);
  ASSERT_FALSE(r.ok());
  std::vector<std::size_t> lines;
  for (const auto& e : r.errors) lines.push_back(e.line);
  // filter.N mismatch, unknown key, duplicate, bad line, missing seed.
  EXPECT_EQ(lines, (std::vector<std::size_t>{0, 3, 4, 6, 7}));
  bool dup = false;
  for (const auto& e : r.errors)
    if (e.message.find("first set on line 5, again on line 6") != std::string::npos) dup = true;
  EXPECT_TRUE(dup);
}

TEST(Config, SemanticChecks) {
  auto bad = [](const std::string& text) { return !parse_config(text).ok(); };
  const std::string base = "filter.N = 10\nexperiment.T = 3\nexperiment.seed = 1\n";
  EXPECT_TRUE(bad(base + "model.name = hmm\n"));
  EXPECT_TRUE(bad(base + "model.name = hmm\nmodel.fixture = five-state\n"));
  EXPECT_TRUE(bad(base + "model.name = hmm\nmodel.initial = 0.5, 0.5\n"
                         "model.transition = 0.5, 0.6; 0.5, 0.5\nmodel.emission = 1; 1\n"));
  EXPECT_FALSE(bad(base + "model.name = hmm\nmodel.initial = 0.5, 0.5\n"
                          "model.transition = 0.5, 0.5; 0.5, 0.5\nmodel.emission = 1; 1\n"));
  EXPECT_TRUE(bad(base + "model.name = sv\nexperiment.mode = clt-check\n"));
  EXPECT_TRUE(bad(base + "model.name = sv\nfilter.R = 5\n"));
  EXPECT_TRUE(bad(base + "model.name = linear-gaussian\nexperiment.observations = 1, 2\n"));
  EXPECT_TRUE(bad(base + "model.name = hmm\nmodel.fixture = two-state\nexperiment.psi = cube\n"));
  EXPECT_FALSE(bad(base + "model.name = sv\nfilter.resample_interval = never\nfilter.sampler = sis\n"));
}

TEST(FormatDouble, ShortestStable) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(-3.0), "-3");
  EXPECT_EQ(format_double(1e-300), "1e-300");
  EXPECT_EQ(format_double(2.0 / 3.0), "0.66666666666666663");
}

TEST(Overrides, ModeAndSeed) {
  auto c = *parse_config(kGood).config;
  apply_overrides(c, Mode::filter, 99);
  EXPECT_EQ(c.experiment.mode, Mode::filter);
  EXPECT_EQ(c.filter.seed, 99u);
  bool found = false;
  for (const auto& [k, v] : c.entries)
    if (k == "experiment.seed") {
      EXPECT_EQ(v, "99");
      found = true;
    }
  EXPECT_TRUE(found);
}

TEST(Experiment, AllModesWriteManifestAndAreReproducible) {
  for (const char* mode : {"filter", "smooth", "likelihood", "clt-check", "resample-check"}) {
    auto c = *parse_config(kGood).config;
    apply_overrides(c, parse_mode(mode), std::nullopt);
    c.experiment.replicates = 20;
    const auto a = scratch_dir(std::string("exp_a_") + mode);
    const auto b = scratch_dir(std::string("exp_b_") + mode);
    std::ostringstream log;
    const int ca = run_experiment(c, a, log);
    const int cb = run_experiment(c, b, log);
    EXPECT_EQ(ca, cb);
    ASSERT_TRUE(std::filesystem::exists(a / "manifest.json")) << mode;
    for (const auto& entry : std::filesystem::directory_iterator(a))
      EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << mode;
  }
}

TEST(Experiment, FilterCsvLayout) {
  auto c = *parse_config(kGood).config;
  apply_overrides(c, Mode::filter, std::nullopt);
  const auto dir = scratch_dir("exp_layout");
  std::ostringstream log;
  ASSERT_EQ(run_experiment(c, dir, log), 0);
  std::istringstream csv(slurp(dir / "filter.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "t,estimate_mean,estimate_var,ess,log_lik_increment,accept_rate,resampled");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 5);
  EXPECT_TRUE(std::filesystem::exists(dir / "oracle.csv"));
}
