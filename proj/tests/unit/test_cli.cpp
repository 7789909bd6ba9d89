#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "plasmondet/config.hpp"
#include "plasmondet/detection_metrics.hpp"
#include "plasmondet/io.hpp"
#include "plasmondet/units.hpp"

using namespace plasmondet;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

const fs::path& scratch() {
  static const fs::path p = [] {
    fs::path d = fs::temp_directory_path() / ("plasmondet_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return p;
}

Run cli(const std::string& args, const std::string& env = "") {
  const fs::path out = scratch() / "stdout";
  const fs::path err = scratch() / "stderr";
  const std::string cmd = env + " '" PLASMONDET_CLI_PATH "' " + args + " >'" + out.string() +
                          "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

CsvData parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

std::string note_value(const CsvData& d, const std::string& name) {
  const std::string prefix = "note: " + name + " = ";
  for (const auto& h : d.header) {
    if (h.rfind(prefix, 0) == 0) return h.substr(prefix.size());
  }
  return {};
}

const std::regex kErrorLine(R"(plasmondet: error kind=(\w+) key=(\S+) message=.+)");

}  // namespace

TEST_CASE("resonance succeeds with the resolved config in the header") {
  const Run r = cli("resonance");
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  const CsvData d = parse(r.out);
  CHECK(d.header.front() == "plasmondet resonance");
  const Config back = Config::from_header(d.header);
  CHECK(back.lines() == Config::defaults().lines());
  bool material = false;
  for (const auto& h : d.header) material |= h.rfind("material stack.metal = ", 0) == 0;
  CHECK(material);
  REQUIRE(d.table.rows.size() == 1);
  CHECK(d.table.rows[0][0] == doctest::Approx(42.670228).epsilon(1e-6));
}

TEST_CASE("config errors exit 2 with parsable stderr") {
  for (const char* args :
       {"resonance --set stack.nope=1", "resonance --set stack.incidence_index=0.5",
        "resonance --set atoms.gap_nm", "resonance --config /nonexistent/x.cfg",
        "trace --set probe.angle_deg=30", "resonance --format tsv", "frobnicate"}) {
    CAPTURE(args);
    const Run r = cli(args);
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    std::istringstream lines(r.err);
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
      CHECK_MESSAGE(std::regex_match(line, kErrorLine), line);
      ++n;
    }
    CHECK(n >= 1);
  }
  const Run r = cli("resonance --set stack.incidence_index=0.5 --set probe.efficiency=3");
  CHECK(r.err.find("key=stack.incidence_index") != std::string::npos);
  CHECK(r.err.find("key=probe.efficiency") != std::string::npos);
  CHECK(cli("trace --set probe.angle_deg=30").err.find("key=probe.angle_deg") != std::string::npos);
}

TEST_CASE("numeric failure exits 3") {
  // an opaque film has no plasmon dip to bracket
  const Run r = cli("resonance --set stack.metal_thickness_nm=1e6");
  CHECK(r.code == 3);
  std::smatch m;
  REQUIRE(std::regex_search(r.err, m, kErrorLine));
  CHECK(m[1] == "numeric");
}

TEST_CASE("runs are deterministic") {
  const std::string args = "trace --set trace.tail_ms=5 --seed 77";
  const Run a = cli(args);
  const Run b = cli(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(cli("trace --set trace.tail_ms=5 --seed 78").out != a.out);
  CHECK(cli(args + " --set run.threads=3").out.size() > 0);

  const Run s1 = cli("spectrum --set spectrum.detuning.points=21 --set run.threads=1");
  const Run s4 = cli("spectrum --set spectrum.detuning.points=21 --set run.threads=4");
  const CsvData d1 = parse(s1.out);
  const CsvData d4 = parse(s4.out);
  CHECK(d1.table.rows == d4.table.rows);
}

TEST_CASE("--out and --config") {
  const fs::path cfg = scratch() / "run.cfg";
  {
    std::ofstream f(cfg);
    f << "angle.points = 3\nangle.min_deg = 42\nangle.max_deg = 43\n";
  }
  const fs::path out = scratch() / "sweep.csv";
  const Run r = cli("angle-sweep --config '" + cfg.string() + "' --set angle.max_deg=44 --out '" +
                    out.string() + "'");
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const CsvData d = parse(slurp(out));
  REQUIRE(d.table.rows.size() == 3);
  CHECK(d.table.rows[2][0] == doctest::Approx(44.0).epsilon(1e-13));
  CHECK(Config::from_header(d.header).raw("angle.max_deg") == "44");
}

TEST_CASE("one-point sweep equals the scalar evaluation") {
  const Run r = cli("angle-sweep --set angle.points=1 --set angle.min_deg=42.5 --set angle.max_deg=43");
  REQUIRE(r.code == 0);
  const CsvData d = parse(r.out);
  REQUIRE(d.table.rows.size() == 1);
  const RunConfig cfg = resolve_config(Config::defaults());
  const PlaneWaveContext ctx(units::from_deg(42.5));
  const auto& row = d.table.rows[0];
  CHECK(row[0] == 42.5);
  CHECK(row[1] == reflectivity(cfg.stack(), ctx));
  CHECK(row[2] == reflectivity_with_atoms(cfg.stack(), cfg.medium(), cfg.geometry, ctx));
  CHECK(row[4] == qnd_max_atoms(cfg.stack(), cfg.medium(), cfg.geometry, ctx, cfg.efficiency));
}

TEST_CASE("matrix output") {
  const Run r = cli("image --set image.rows=6 --set image.cols=4 --format matrix");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const MatrixData m = read_matrix(in);
  CHECK(m.rows == 6);
  CHECK(m.cols == 4);
  CHECK(m.pitch == doctest::Approx(5e-6));
  CHECK(Config::from_header(m.header).raw("output.format") == "matrix");

  const Run c = cli("image --set image.rows=6 --set image.cols=4");
  const CsvData d = parse(c.out);
  REQUIRE(d.table.rows.size() == 24);
  for (std::size_t i = 0; i < 24; ++i) CHECK(d.table.rows[i][2] == m.values[i]);

  const Run q = cli("qnd-map --set qnd.density.points=2 --set qnd.detuning.points=3 --format matrix");
  REQUIRE(q.code == 0);
  std::istringstream qin(q.out);
  const MatrixData qm = read_matrix(qin);
  CHECK(qm.rows == 6);
  CHECK(qm.cols == 4);
}

TEST_CASE("materials directory override") {
  const fs::path dir = scratch() / "materials";
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "gold.nk");
    f << "700 0.2 4.5\n900 0.2 4.5\n";
  }
  const Run r = cli("resonance", "PLASMONDET_MATERIALS='" + dir.string() + "'");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("material stack.metal = 0.2+4.5i") != std::string::npos);
  const Run bad = cli("resonance", "PLASMONDET_MATERIALS='" + (scratch() / "empty").string() + "'");
  CHECK(bad.code == 2);
  CHECK(bad.err.find("key=stack.metal") != std::string::npos);
}

TEST_CASE("trace reports fit notes") {
  const Run r = cli("trace --set trace.tail_ms=5");
  REQUIRE(r.code == 0);
  const CsvData d = parse(r.out);
  CHECK_FALSE(note_value(d, "N_det").empty());
  CHECK_FALSE(note_value(d, "fit_snr").empty());
  CHECK(d.table.columns == std::vector<std::string>{"time_s", "delta_R"});
}
