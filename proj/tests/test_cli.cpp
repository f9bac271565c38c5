#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"

#include "doctest.h"

#ifndef MTX_BINARY
#error "MTX_BINARY must point at the mtx executable"
#endif

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// stdout and stderr together
Run run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + "'" MTX_BINARY "' " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) v.push_back(l);
  return v;
}

std::vector<double> csv_row(const std::string& l) {
  std::vector<double> v;
  std::istringstream in(l);
  for (std::string f; std::getline(in, f, ',');) v.push_back(std::stod(f));
  return v;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("--help").code == 0);
  CHECK(run("no-such-command").code == 1);
  CHECK(run("verify --suite nonsense").code == 1);
  CHECK(run("ball-max --alpha 20 --beta 1").code == 1);
  CHECK(run("ball-max --nodes 2").code == 1);
  CHECK(run("--tol-override isometry ball-max --nodes 64").code == 1);
  CHECK(run("--tol-override nonsense=1 ball-max --nodes 64").code == 1);

  // group lines go to stderr, the report to --out
  std::string report = "mtx_cli_verify.json";
  Run ok = run("--out " + report + " verify --suite identities");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("Ta isometry") != std::string::npos);
  auto j = nlohmann::json::parse(std::ifstream(report));
  CHECK(j["pass"] == true);
  CHECK(j["suite"] == "identities");
  std::remove(report.c_str());
  CHECK(run("--tol-override isometry=1e-14 verify --suite identities").code == 2);
}

TEST_CASE("same seed, same bytes") {
  std::string args = "--seed 7 ball-max --beta 0.5 --nodes 512 --restarts 3";
  Run a = run(args), b = run(args), c = run("--threads 1 " + args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["norm"].get<double>() <= 1.0 + 1e-10);
  CHECK(j["value"].get<double>() > 2.0 * 3.14159265358979 * std::exp(1.0) / 1.5);
}

TEST_CASE("moser-limit sweep") {
  Run r = run("--format csv moser-limit --beta 0 --kmax 20");
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 18);
  CHECK(ls.front() == "k,eps,L,value,extrapolation,target");
  auto last = csv_row(ls.back());
  CHECK(last[0] == 20);
  // frozen: the extrapolation sits about 1.1% under the 2 pi target
  CHECK(last[4] == doctest::Approx(6.2117873).epsilon(1e-6));
  CHECK(last[5] == doctest::Approx(2.0 * 3.14159265358979).epsilon(1e-12));
}

TEST_CASE("gap and incenter-map") {
  Run g = run("--format csv gap --beta 1 --nodes 1024 --restarts 2");
  REQUIRE(g.code == 0);
  auto ls = lines(g.out);
  REQUIRE(ls.size() == 2);
  auto row = csv_row(ls[1]);
  CHECK(row[2] - row[3] == doctest::Approx(row[7]).epsilon(1e-12));
  CHECK(row[7] > 0.0);

  Run m = run("--format csv incenter-map --mesh disk --points '0,0;0.5,0'");
  REQUIRE(m.code == 0);
  auto ml = lines(m.out);
  REQUIRE(ml.size() == 3);
  CHECK(csv_row(ml[1])[2] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(csv_row(ml[2])[2] == doctest::Approx(0.75).epsilon(1e-3));
}

TEST_CASE("input errors reach the user") {
  std::string bad = "mtx_cli_bad_mesh.json";
  std::ofstream(bad) << "{\"vertices\": [1, 2";
  Run r = run("greens --mesh " + bad);
  CHECK(r.code == 1);
  CHECK(r.out.find("parse error") != std::string::npos);
  std::remove(bad.c_str());

  Run missing = run("greens --mesh square", "MTX_DATA_DIR=/nonexistent/mtx");
  CHECK(missing.code == 1);
  CHECK(missing.out.find("CHECKSUMS") != std::string::npos);

  Run outside = run("greens --mesh square --pole 3,0");
  CHECK(outside.code == 1);
}

TEST_CASE("greens json") {
  Run r = run("greens --mesh square --levels 0.1,0.3");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j.dump().find("incenter") != std::string::npos);
}
