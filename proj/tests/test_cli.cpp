// Black-box tests: run the installed binary and look only at exit codes,
// stdout and the files it writes.
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "smallball/sbd_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SMALLBALL_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("smallball_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").code == 0);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("bound --d 1").code == 2);
  CHECK(run("bound --d 0 --k 1").code == 2);
  CHECK(run("bound --d 1 --k -1").code == 2);
  CHECK(run("rearrange --input /nonexistent/x.sbd --output /tmp/y.sbd").code == 2);
}

TEST_CASE("bound prints the extremal value") {
  const Run r = run("bound --d 1 --k 1 --k 1 --set-volume 1 --resolution 4096 --exact-check");
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header.rfind("quantity,value,budget", 0) == 0);
  const auto c1 = row.find(',');
  const double value = std::stod(row.substr(c1 + 1));
  CHECK(std::abs(value - 0.75) < 1e-3);
}

TEST_CASE("gen, rearrange and convolve") {
  TempDir tmp;
  REQUIRE(run("gen --kind random --d 2 --k 2 --seed 5 --output " + (tmp / "f.sbd")).code == 0);
  const smallball::GridDensity f = smallball::load_density(tmp / "f.sbd");
  CHECK(f.spec().dim() == 2);

  // round trip through the file keeps every bit
  std::ostringstream again;
  smallball::write_density(again, f);
  CHECK(again.str() == slurp(tmp / "f.sbd"));

  REQUIRE(run("gen --kind random --d 2 --k 2 --seed 5 --output " + (tmp / "f2.sbd")).code == 0);
  CHECK(slurp(tmp / "f.sbd") == slurp(tmp / "f2.sbd"));

  REQUIRE(run("rearrange --input " + (tmp / "f.sbd") + " --output " + (tmp / "g.sbd")).code == 0);
  REQUIRE(run("rearrange --input " + (tmp / "g.sbd") + " --output " + (tmp / "h.sbd")).code == 0);
  CHECK(slurp(tmp / "g.sbd") == slurp(tmp / "h.sbd"));

  REQUIRE(run("convolve --input " + (tmp / "f.sbd") + " --input " + (tmp / "g.sbd") + " --output " +
              (tmp / "s.sbd"))
              .code == 0);
  CHECK(std::abs(smallball::integral(smallball::load_density(tmp / "s.sbd")) - 1.0) < 1e-9);

  std::ofstream(tmp / "bad.sbd") << "sbd 1 density\n1\n0 1 2\n1\n";
  CHECK(run("rearrange --input " + (tmp / "bad.sbd") + " --output " + (tmp / "x.sbd")).code == 2);
  CHECK_FALSE(fs::exists(tmp / "x.sbd"));
}

TEST_CASE("check sweeps are deterministic and pass") {
  const Run a = run("check theorem1 --d 1 --n 2 --seeds 8 --seed 3 --resolution 128");
  const Run b = run("check theorem1 --d 1 --n 2 --seeds 8 --seed 3 --resolution 128");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  std::size_t rows = 0;
  for (char c : a.out) rows += c == '\n';
  CHECK(rows == 9);

  CHECK(run("check decompose --seeds 10").code == 0);
  CHECK(run("check bll --seeds 5").code == 0);
  CHECK(run("check bridge --seeds 3").code == 0);
  CHECK(run("check corollary --d 2 --n 2 --k 1 --seeds 4 --resolution 32").code == 0);
}

TEST_CASE("single checks from files") {
  TempDir tmp;
  std::ofstream(tmp / "f.sbd") << "sbd 1 density\n1\n-0.5 0.5 4\n0 2 2 0\n";
  std::ofstream(tmp / "s.sbd") << "sbd 1 mask\n1\n-1.125 1.125 9\n0 0 0 1 1 1 0 0 0\n";
  const std::string pair = " --input " + (tmp / "f.sbd") + " --input " + (tmp / "f.sbd") + " --mask " + (tmp / "s.sbd");
  CHECK(run("check theorem1" + pair + " --k 2").code == 0);
  // ess_sup is 2, so claiming K = 1 violates the hypothesis before anything is computed
  CHECK(run("check theorem1" + pair + " --k 1").code == 2);

  std::ofstream(tmp / "g.sbd") << "sbd 1 density\n1\n0 4 4\n0.5 0.25 0.125 0.125\n";
  const std::string dec = "check decompose --input " + (tmp / "g.sbd") + " --k 1 --y 0.3 --delta 0.5";
  CHECK(run(dec + " --p1 " + (tmp / "p1.sbd") + " --p2 " + (tmp / "p2.sbd")).code == 0);
  const smallball::GridDensity g = smallball::load_density(tmp / "g.sbd");
  const smallball::GridDensity p1 = smallball::load_density(tmp / "p1.sbd");
  const smallball::GridDensity p2 = smallball::load_density(tmp / "p2.sbd");
  for (std::size_t i = 0; i < 4; ++i) CHECK((p1[i] + p2[i]) / 2.0 == g[i]);
  CHECK(p1.values() != p2.values());
  CHECK(run("check decompose --input " + (tmp / "g.sbd") + " --k 1 --y 0.1 --delta 0.5").code == 2);
}

TEST_CASE("sample agrees with the grid value") {
  TempDir tmp;
  {
    std::ofstream box(tmp / "box.sbd");
    box << "sbd 1 density\n1\n-0.5 0.5 32\n";
    for (int i = 0; i < 32; ++i) box << (i ? " 1" : "1");
    box << "\n";
  }
  REQUIRE(run("gen --kind ball-mask --d 1 --count 64 --lo -1 --hi 1 --set-volume 1 --output " + (tmp / "s.sbd"))
              .code == 0);
  const Run r = run("sample --input " + (tmp / "box.sbd") + " --input " + (tmp / "box.sbd") + " --mask " +
                    (tmp / "s.sbd") + " --samples 100000 --seed 4");
  CHECK(r.code == 0);
  CHECK(r.out == run("sample --input " + (tmp / "box.sbd") + " --input " + (tmp / "box.sbd") + " --mask " +
                     (tmp / "s.sbd") + " --samples 100000 --seed 4")
                     .out);
}
