#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "qcdj/channels.hpp"
#include "qcdj/cli.hpp"
#include "qcdj/io.hpp"
#include "qcdj/linalg.hpp"
#include "qcdj/matrix.hpp"
#include "qcdj/rng.hpp"
#include "qcdj/states.hpp"

using namespace qcdj;

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path tmp_dir() {
  const fs::path p = fs::temp_directory_path() / "qcdj_cli_tests";
  fs::create_directories(p);
  return p;
}

std::string tmp_path(const std::string& name) {
  return (tmp_dir() / name).string();
}

int run(std::initializer_list<std::string> args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::vector<std::string> full;
  full.emplace_back("qcdj");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const std::string& s : full) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int rc =
      run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

json run_json(std::initializer_list<std::string> args, int expect_rc) {
  std::string out, err;
  const int rc = run(args, &out, &err);
  INFO("stderr: " << err);
  REQUIRE(rc == expect_rc);
  return json::parse(out);
}

Mat diag_state(const std::vector<double>& p) {
  Mat m(static_cast<int>(p.size()), static_cast<int>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i)
    m(static_cast<int>(i), static_cast<int>(i)) = p[i];
  return m;
}

std::string write_diag_state(const std::string& name,
                             const std::vector<double>& p) {
  const std::string path = tmp_path(name);
  write_state_file(path, diag_state(p));
  return path;
}

// Single-input channel that discards its input and prepares `target`.
Channel replacer_channel(const Mat& target) {
  const int d = target.rows();
  const HermitianEig eg = hermitian_eig(target);
  std::vector<Mat> kraus;
  for (int k = 0; k < d; ++k) {
    const double lam = std::max(eg.values[k], 0.0);
    if (lam < 1e-15) continue;
    for (int j = 0; j < d; ++j) {
      Mat op(d, d);
      for (int i = 0; i < d; ++i) op(i, j) = std::sqrt(lam) * eg.vectors(i, k);
      kraus.push_back(op);
    }
  }
  return Channel(d, 1, d, std::move(kraus), true);
}

std::string write_replacer(const std::string& name,
                           const std::vector<double>& p) {
  const std::string path = tmp_path(name);
  write_channel_file(path, replacer_channel(diag_state(p)));
  return path;
}

double value_of(const json& j, const char* key) {
  return std::stod(j.at(key).get<std::string>());
}

}  // namespace

TEST_CASE("state files round trip and validate") {
  Rng rng(11);
  const Mat rho = random_density(3, rng);
  const std::string path = tmp_path("state_rt.json");
  write_state_file(path, rho);
  const Mat back = parse_state_file(path);
  CHECK((back - rho).norm_fro() <= 1e-13);

  // Emission does not validate, so malformed physics is caught on parse.
  write_state_file(tmp_path("state_npsd.json"), diag_state({1.5, -0.5}));
  CHECK_THROWS_AS(parse_state_file(tmp_path("state_npsd.json")),
                  std::invalid_argument);
  write_state_file(tmp_path("state_tr.json"), diag_state({0.6, 0.6}));
  CHECK_THROWS_AS(parse_state_file(tmp_path("state_tr.json")),
                  std::invalid_argument);
  Mat nh(2, 2);
  nh(0, 1) = cx(1.0, 0.0);  // not Hermitian
  nh(0, 0) = nh(1, 1) = cx(0.5, 0.0);
  write_state_file(tmp_path("state_nh.json"), nh);
  CHECK_THROWS_AS(parse_state_file(tmp_path("state_nh.json")),
                  std::invalid_argument);

  std::ofstream(tmp_path("state_bad.json")) << "this is not json";
  CHECK_THROWS_AS(parse_state_file(tmp_path("state_bad.json")),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_state_file(tmp_path("no_such_file.json")),
                  std::invalid_argument);
}

TEST_CASE("channel files accept kraus or choi forms and validate") {
  // Hand-written identity channel: one Kraus block, the 2x2 identity.
  {
    std::ofstream f(tmp_path("chan_id.json"));
    f << R"({"dims": {"A": 2, "E": 1, "B": 2}, "trace_preserving": true,
            "kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]})";
  }
  const Channel id = parse_channel_file(tmp_path("chan_id.json"));
  CHECK(id.dim_a() == 2);
  CHECK(id.dim_e() == 1);
  CHECK(id.dim_b() == 2);
  CHECK(id.tp_residual() <= 1e-12);
  const Mat probe = diag_state({0.25, 0.75});
  CHECK((id.apply(probe) - probe).norm_fro() <= 1e-14);

  // Scaling every Kraus operator breaks the completeness relation.
  {
    std::ofstream f(tmp_path("chan_scaled.json"));
    f << R"({"dims": {"A": 2, "E": 1, "B": 2}, "trace_preserving": true,
            "kraus": [[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]]})";
  }
  CHECK_THROWS_AS(parse_channel_file(tmp_path("chan_scaled.json")),
                  std::invalid_argument);

  // Serialization round trip preserves the Choi matrix.
  Rng rng(23);
  const Channel c = random_cptp(2, 2, 2, 3, rng);
  write_channel_file(tmp_path("chan_rt.json"), c);
  const Channel back = parse_channel_file(tmp_path("chan_rt.json"));
  CHECK((back.choi() - c.choi()).norm_fro() <= 1e-12);

  // Choi form reproduces the same channel.
  {
    json j;
    j["dims"] = {{"A", 2}, {"E", 2}, {"B", 2}};
    j["trace_preserving"] = true;
    const Mat& ch = c.choi();
    json rows = json::array();
    for (int i = 0; i < ch.rows(); ++i) {
      json row = json::array();
      for (int k = 0; k < ch.cols(); ++k)
        row.push_back({ch(i, k).real(), ch(i, k).imag()});
      rows.push_back(row);
    }
    j["choi"] = rows;
    std::ofstream(tmp_path("chan_choi.json")) << j.dump();
  }
  const Channel from_choi = parse_channel_file(tmp_path("chan_choi.json"));
  CHECK((from_choi.choi() - c.choi()).norm_fro() <= 1e-10);

  // Exactly one of kraus/choi is required.
  {
    std::ofstream f(tmp_path("chan_none.json"));
    f << R"({"dims": {"A": 2, "E": 1, "B": 2}, "trace_preserving": true})";
  }
  CHECK_THROWS_AS(parse_channel_file(tmp_path("chan_none.json")),
                  std::invalid_argument);
  {
    std::ofstream f(tmp_path("chan_both.json"));
    f << R"({"dims": {"A": 2, "E": 1, "B": 2}, "trace_preserving": true,
            "kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]], "choi": []})";
  }
  CHECK_THROWS_AS(parse_channel_file(tmp_path("chan_both.json")),
                  std::invalid_argument);

  // A non-CP Choi matrix (negative eigenvalue) is rejected.
  {
    json j;
    j["dims"] = {{"A", 2}, {"E", 1}, {"B", 2}};
    j["trace_preserving"] = false;
    json rows = json::array();
    for (int i = 0; i < 4; ++i) {
      json row = json::array();
      for (int k = 0; k < 4; ++k) {
        double re = 0.0;
        if (i == k) re = i == 0 ? -0.5 : 0.5;
        row.push_back({re, 0.0});
      }
      rows.push_back(row);
    }
    j["choi"] = rows;
    std::ofstream(tmp_path("chan_ncp.json")) << j.dump();
  }
  CHECK_THROWS_AS(parse_channel_file(tmp_path("chan_ncp.json")),
                  std::invalid_argument);
}

TEST_CASE("divergence command computes state divergences") {
  const std::string a = write_diag_state("div_a.json", {0.5, 0.5});
  const std::string b = write_diag_state("div_b.json", {0.9, 0.1});

  SUBCASE("identical states have zero relative entropy") {
    const json rep = run_json({"divergence", "--kind", "umegaki", "--state-a",
                               a, "--state-b", a, "--no-meta"},
                              0);
    CHECK(rep.at("config").at("command") == "divergence");
    CHECK(std::abs(value_of(rep, "value")) <= 1e-12);
  }

  SUBCASE("petz order one half matches the classical oracle") {
    const json rep =
        run_json({"divergence", "--kind", "petz", "--alpha", "0.5",
                  "--state-a", a, "--state-b", b, "--no-meta"},
                 0);
    const double want = oracle::renyi_bits(0.5, {0.5, 0.5}, {0.9, 0.1});
    CHECK(value_of(rep, "value") == doctest::Approx(want).epsilon(1e-9));
  }

  SUBCASE("measured renyi on commuting states matches the classical value") {
    const json rep =
        run_json({"divergence", "--kind", "measured-renyi", "--alpha", "0.5",
                  "--state-a", a, "--state-b", b, "--no-meta"},
                 0);
    const double want = oracle::renyi_bits(0.5, {0.5, 0.5}, {0.9, 0.1});
    CHECK(value_of(rep, "value") == doctest::Approx(want).epsilon(1e-5));
  }

  SUBCASE("orthogonal pure states are perfectly testable") {
    const std::string e0 = write_diag_state("div_e0.json", {1.0, 0.0});
    const std::string e1 = write_diag_state("div_e1.json", {0.0, 1.0});
    std::string out;
    const int rc = run({"divergence", "--kind", "hypothesis", "--epsilon",
                        "0.1", "--state-a", e0, "--state-b", e1, "--no-meta"},
                       &out);
    CHECK(rc == 2);  // infinite divergence reported as support violation
    const json rep = json::parse(out);
    CHECK(rep.at("value").get<std::string>() == "inf");
    CHECK(value_of(rep, "beta") == 0.0);
  }

  SUBCASE("support violations exit with code two") {
    const std::string full = write_diag_state("div_full.json", {0.5, 0.5});
    const std::string pure = write_diag_state("div_pure.json", {1.0, 0.0});
    std::string out;
    const int rc = run({"divergence", "--kind", "umegaki", "--state-a", full,
                        "--state-b", pure, "--no-meta"},
                       &out);
    CHECK(rc == 2);
    CHECK(json::parse(out).at("value").get<std::string>() == "inf");
  }
}

TEST_CASE("minimax command solves the identical-channel game") {
  Rng rng(37);
  const std::string path = tmp_path("mm_chan.json");
  write_channel_file(path, random_cptp(2, 2, 2, 3, rng));
  const json rep = run_json(
      {"minimax", "--channel-n", path, "--channel-m", path, "--div", "umegaki",
       "--restarts", "2", "--gap-tol", "1e-7", "--no-meta"},
      0);
  CHECK(std::abs(value_of(rep, "value")) <= 1e-6);
  CHECK(value_of(rep, "gap") <= 1e-6);
  CHECK(rep.at("converged").get<bool>());
  const auto& rho = rep.at("rho_a");
  REQUIRE(rho.size() == 2);
  const double tr =
      rho[0][0][0].get<double>() + rho[1][1][0].get<double>();
  CHECK(tr == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("beta command reports the optimal type-II error") {
  const std::string n = write_replacer("beta_n.json", {1.0, 0.0});
  const std::string m = write_replacer("beta_m.json", {0.0, 1.0});
  const json rep = run_json({"beta", "--channel-n", n, "--channel-m", m,
                             "--epsilon", "0.1", "--no-meta"},
                            0);
  CHECK(value_of(rep, "beta") == 0.0);
  CHECK(rep.at("divergence").get<std::string>() == "inf");
}

TEST_CASE("stein command tabulates per-copy values") {
  const std::string n = write_replacer("stein_n.json", {0.7, 0.3});
  const std::string m = write_replacer("stein_m.json", {0.4, 0.6});
  const double kl = oracle::kl_bits({0.7, 0.3}, {0.4, 0.6});

  const json rep =
      run_json({"stein", "--channel-n", n, "--channel-m", m, "--div",
                "umegaki", "--epsilon", "0.1", "--n-max", "2", "--no-meta"},
               0);
  REQUIRE(rep.at("per_n").size() == 2);
  for (const auto& row : rep.at("per_n"))
    CHECK(std::stod(row.at("value").get<std::string>()) ==
          doctest::Approx(kl).epsilon(1e-6));
  REQUIRE(rep.at("sandwich").size() == 2);
  for (const auto& row : rep.at("sandwich"))
    CHECK(row.at("ordered").get<bool>());

  std::string csv;
  const int rc = run({"stein", "--channel-n", n, "--channel-m", m, "--div",
                      "umegaki", "--epsilon", "0.1", "--n-max", "2",
                      "--format", "csv", "--no-meta"},
                     &csv);
  CHECK(rc == 0);
  CHECK(csv.find("n,raw,value") != std::string::npos);
  int data_rows = 0;
  std::istringstream lines(csv);
  for (std::string line; std::getline(lines, line);)
    if (!line.empty() && line[0] >= '1' && line[0] <= '9') ++data_rows;
  CHECK(data_rows == 2);
}

TEST_CASE("verify command is deterministic and gates on hard violations") {
  std::string first, second;
  const int rc1 = run({"verify", "--dims", "2,1,2", "--trials", "1", "--seed",
                       "11", "--no-meta"},
                      &first);
  const int rc2 = run({"verify", "--dims", "2,1,2", "--trials", "1", "--seed",
                       "11", "--no-meta"},
                      &second);
  CHECK(rc1 == 0);
  CHECK(rc2 == 0);
  CHECK(first == second);
  const json rep = json::parse(first);
  CHECK(rep.at("hard_violations").get<int>() == 0);
  CHECK(rep.at("config").at("trials").get<int>() == 1);
  CHECK(rep.at("checks").size() > 0);
}

TEST_CASE("usage errors exit with code one") {
  std::string out, err;
  CHECK(run({"frobnicate"}, &out, &err) == 1);
  CHECK(!err.empty());
  CHECK(run({"divergence", "--kind", "umegaki"}, &out, &err) == 1);
  CHECK(run({"divergence", "--kind", "no-such-kind", "--state-a", "x",
             "--state-b", "y"},
            &out, &err) == 1);
  CHECK(run({}, &out, &err) == 1);
}

TEST_CASE("dimension cap exits with code three") {
  Rng rng(91);
  const std::string path = tmp_path("cap_chan.json");
  write_channel_file(path, random_cptp(4, 4, 4, 4, rng));
  std::string out, err;
  CHECK(run({"minimax", "--channel-n", path, "--channel-m", path, "--div",
             "umegaki", "--n", "3", "--no-meta"},
            &out, &err) == 3);
  CHECK(run({"stein", "--channel-n", path, "--channel-m", path, "--div",
             "umegaki", "--n-max", "3", "--no-meta"},
            &out, &err) == 3);
  CHECK(run({"beta", "--channel-n", path, "--channel-m", path, "--epsilon",
             "0.1", "--n", "3", "--no-meta"},
            &out, &err) == 3);
}

TEST_CASE("reports embed the run configuration") {
  const std::string a = write_diag_state("cfg_a.json", {0.5, 0.5});
  const json rep = run_json({"divergence", "--kind", "umegaki", "--state-a", a,
                             "--state-b", a, "--seed", "77", "--no-meta"},
                            0);
  const json& cfg = rep.at("config");
  CHECK(cfg.at("seed").get<std::uint64_t>() == 77);
  CHECK(cfg.at("format") == "json");
  CHECK(cfg.at("dim_cap").get<int>() >= 1);
  CHECK(cfg.at("threads").get<int>() == 1);
  // Default runs include a meta block; --no-meta drops it.
  CHECK(!rep.contains("meta"));
  const json with_meta = run_json(
      {"divergence", "--kind", "umegaki", "--state-a", a, "--state-b", a}, 0);
  CHECK(with_meta.contains("meta"));
}

TEST_CASE("output lands in a file with --out") {
  const std::string a = write_diag_state("out_a.json", {0.5, 0.5});
  const std::string dest = tmp_path("report.json");
  std::string out;
  const int rc = run({"divergence", "--kind", "umegaki", "--state-a", a,
                      "--state-b", a, "--out", dest, "--no-meta"},
                     &out);
  CHECK(rc == 0);
  CHECK(out.empty());
  std::ifstream f(dest);
  REQUIRE(f.good());
  std::stringstream buf;
  buf << f.rdbuf();
  const json rep = json::parse(buf.str());
  CHECK(std::abs(value_of(rep, "value")) <= 1e-12);
}
