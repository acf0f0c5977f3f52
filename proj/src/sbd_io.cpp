#include "smallball/sbd_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "smallball/error.hpp"

namespace smallball {
namespace {

class Tokens {
 public:
  explicit Tokens(std::istream& in) {
    std::string word;
    while (in >> word) words_.push_back(std::move(word));
  }

  bool done() const { return pos_ >= words_.size(); }

  const std::string& next(const char* what) {
    if (done()) throw FormatError(std::string("unexpected end of input, expected ") + what);
    return words_[pos_++];
  }

  double real(const char* what) {
    const std::string& w = next(what);
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), x);
    if (ec != std::errc() || ptr != w.data() + w.size()) {
      throw FormatError(std::string("expected ") + what + ", got '" + w + "'");
    }
    return x;
  }

  std::size_t count(const char* what) {
    const std::string& w = next(what);
    std::size_t x = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), x);
    if (ec != std::errc() || ptr != w.data() + w.size()) {
      throw FormatError(std::string("expected ") + what + ", got '" + w + "'");
    }
    return x;
  }

  void expect_end() const {
    if (!done()) throw FormatError("trailing tokens after the last value");
  }

 private:
  std::vector<std::string> words_;
  std::size_t pos_ = 0;
};

SbdKind read_header(Tokens& t) {
  if (t.next("'sbd'") != "sbd") throw FormatError("not an SBD file (missing 'sbd' tag)");
  if (t.next("version") != "1") throw FormatError("unsupported SBD version");
  const std::string& kind = t.next("kind");
  if (kind == "density") return SbdKind::density;
  if (kind == "mask") return SbdKind::mask;
  throw FormatError("unknown SBD kind '" + kind + "'");
}

GridSpec read_spec(Tokens& t) {
  const std::size_t d = t.count("dimension");
  if (d == 0) throw FormatError("dimension must be at least 1");
  std::vector<Interval> extents(d);
  std::vector<std::size_t> counts(d);
  for (std::size_t a = 0; a < d; ++a) {
    extents[a].lo = t.real("axis lo");
    extents[a].hi = t.real("axis hi");
    counts[a] = t.count("axis cell count");
  }
  try {
    return GridSpec(std::move(extents), std::move(counts));
  } catch (const Error& e) {
    throw FormatError(std::string("invalid grid: ") + e.what());
  }
}

void write_spec(std::ostream& out, const GridSpec& spec) {
  out << spec.dim() << '\n';
  for (std::size_t a = 0; a < spec.dim(); ++a) {
    out << format_real(spec.extents()[a].lo) << ' ' << format_real(spec.extents()[a].hi) << ' '
        << spec.counts()[a] << '\n';
  }
}

template <typename Emit>
void write_rows(std::ostream& out, const GridSpec& spec, Emit emit) {
  const std::size_t row = spec.counts().back();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    emit(i);
    out << (((i + 1) % row == 0) ? '\n' : ' ');
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

SbdKind peek_sbd_kind(std::istream& in) {
  const auto start = in.tellg();
  std::string tag, version, kind;
  in >> tag >> version >> kind;
  in.clear();
  in.seekg(start);
  if (tag != "sbd" || version != "1") throw FormatError("not an SBD v1 file");
  if (kind == "density") return SbdKind::density;
  if (kind == "mask") return SbdKind::mask;
  throw FormatError("unknown SBD kind '" + kind + "'");
}

GridDensity read_density(std::istream& in) {
  Tokens t(in);
  if (read_header(t) != SbdKind::density) throw FormatError("expected an SBD density, found a mask");
  GridSpec spec = read_spec(t);
  std::vector<double> values(spec.size());
  for (double& v : values) v = t.real("cell value");
  t.expect_end();
  try {
    return GridDensity(std::move(spec), std::move(values));
  } catch (const Error& e) {
    throw FormatError(std::string("invalid density: ") + e.what());
  }
}

RegionMask read_mask(std::istream& in) {
  Tokens t(in);
  if (read_header(t) != SbdKind::mask) throw FormatError("expected an SBD mask, found a density");
  GridSpec spec = read_spec(t);
  std::vector<std::uint8_t> inc(spec.size());
  for (auto& b : inc) {
    const std::string& w = t.next("mask entry");
    if (w == "0") {
      b = 0;
    } else if (w == "1") {
      b = 1;
    } else {
      throw FormatError("mask entries must be 0 or 1, got '" + w + "'");
    }
  }
  t.expect_end();
  return RegionMask(std::move(spec), std::move(inc));
}

void write_density(std::ostream& out, const GridDensity& f) {
  out << "sbd 1 density\n";
  write_spec(out, f.spec());
  write_rows(out, f.spec(), [&](std::size_t i) { out << format_real(f[i]); });
}

void write_mask(std::ostream& out, const RegionMask& s) {
  out << "sbd 1 mask\n";
  write_spec(out, s.spec());
  write_rows(out, s.spec(), [&](std::size_t i) { out << (s.contains(i) ? '1' : '0'); });
}

CoefficientMatrix read_coefficients(std::istream& in) {
  Tokens t(in);
  const std::size_t k = t.count("row count k");
  const std::size_t n = t.count("column count n");
  if (k == 0 || n == 0) throw FormatError("coefficient matrix must be at least 1 x 1");
  std::vector<double> entries(k * n);
  for (double& e : entries) e = t.real("coefficient");
  t.expect_end();
  return CoefficientMatrix(k, n, std::move(entries));
}

void write_coefficients(std::ostream& out, const CoefficientMatrix& a) {
  out << a.rows() << ' ' << a.cols() << '\n';
  for (std::size_t j = 0; j < a.rows(); ++j) {
    for (std::size_t m = 0; m < a.cols(); ++m) {
      out << format_real(a(j, m)) << (m + 1 == a.cols() ? '\n' : ' ');
    }
  }
}

PiecewisePolynomial read_piecewise(std::istream& in) {
  std::size_t pieces = 0;
  if (!(in >> pieces) || pieces == 0) throw FormatError("expected a positive piece count");
  std::string line;
  std::getline(in, line);
  std::vector<double> breakpoints;
  std::vector<std::vector<double>> coeffs;
  for (std::size_t i = 0; i < pieces; ++i) {
    if (!std::getline(in, line)) throw FormatError("missing piece line");
    std::istringstream ls(line);
    Tokens t(ls);
    const double lo = t.real("piece lo");
    const double hi = t.real("piece hi");
    std::vector<double> c;
    while (!t.done()) c.push_back(t.real("coefficient"));
    if (breakpoints.empty()) {
      breakpoints.push_back(lo);
    } else if (breakpoints.back() != lo) {
      throw FormatError("piece " + std::to_string(i) + " does not start where the previous ended");
    }
    breakpoints.push_back(hi);
    coeffs.push_back(std::move(c));
  }
  try {
    return PiecewisePolynomial(std::move(breakpoints), std::move(coeffs));
  } catch (const Error& e) {
    throw FormatError(std::string("invalid piecewise polynomial: ") + e.what());
  }
}

void write_piecewise(std::ostream& out, const PiecewisePolynomial& p) {
  out << p.piece_count() << '\n';
  for (std::size_t i = 0; i < p.piece_count(); ++i) {
    out << format_real(p.breakpoints()[i]) << ' ' << format_real(p.breakpoints()[i + 1]);
    for (double c : p.pieces()[i]) out << ' ' << format_real(c);
    out << '\n';
  }
}

GridDensity load_density(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_density(in);
}

RegionMask load_mask(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_mask(in);
}

CoefficientMatrix load_coefficients(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_coefficients(in);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw FormatError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw FormatError("cannot move output into '" + path.string() + "': " + ec.message());
  }
}

}  // namespace smallball
