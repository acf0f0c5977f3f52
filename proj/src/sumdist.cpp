#include "smallball/sumdist.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <string>

#include "smallball/error.hpp"
#include "smallball/summation.hpp"

namespace smallball {
namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (plan_ == nullptr) throw Error("FFTW failed to create a plan");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

void check_compatible(const GridSpec& f, const GridSpec& g, const char* what) {
  if (f.dim() != g.dim()) {
    throw ShapeError(std::string(what) + ": dimension mismatch (" + std::to_string(f.dim()) +
                     " vs " + std::to_string(g.dim()) + ")");
  }
  if (!same_cell_size(f, g)) throw ShapeError(std::string(what) + ": cell sizes differ");
}

// Flat offsets of every cell of `spec` under the strides of a larger grid.
std::vector<std::size_t> offsets_in(const GridSpec& spec, const std::vector<std::size_t>& strides) {
  std::vector<std::size_t> out(spec.size());
  std::vector<std::size_t> idx(spec.dim());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    spec.unravel(i, idx);
    std::size_t off = 0;
    for (std::size_t a = 0; a < spec.dim(); ++a) off += idx[a] * strides[a];
    out[i] = off;
  }
  return out;
}

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& counts) {
  std::vector<std::size_t> s(counts.size());
  std::size_t acc = 1;
  for (std::size_t a = counts.size(); a-- > 0;) {
    s[a] = acc;
    acc *= counts[a];
  }
  return s;
}

std::vector<double> convolve_direct(const GridDensity& f, const GridDensity& g, const GridSpec& out) {
  const auto strides = strides_of(out.counts());
  const auto off_f = offsets_in(f.spec(), strides);
  const auto off_g = offsets_in(g.spec(), strides);
  std::vector<double> acc(out.size(), 0.0);
  for (std::size_t i = 0; i < f.values().size(); ++i) {
    const double fi = f[i];
    if (fi == 0.0) continue;
    double* base = acc.data() + off_f[i];
    for (std::size_t j = 0; j < g.values().size(); ++j) base[off_g[j]] += fi * g[j];
  }
  return acc;
}

std::vector<double> convolve_fft(const GridDensity& f, const GridDensity& g, const GridSpec& out) {
  const std::size_t d = out.dim();
  const auto& n = out.counts();
  std::vector<int> dims(d);
  for (std::size_t a = 0; a < d; ++a) {
    if (n[a] > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
      throw PreconditionError("convolution grid too large for FFT");
    }
    dims[a] = static_cast<int>(n[a]);
  }
  const std::size_t real_size = out.size();
  const std::size_t complex_size = real_size / n[d - 1] * (n[d - 1] / 2 + 1);

  auto buf_f = fftw_buffer<double>(real_size);
  auto buf_g = fftw_buffer<double>(real_size);
  auto spec_f = fftw_buffer<fftw_complex>(complex_size);
  auto spec_g = fftw_buffer<fftw_complex>(complex_size);

  std::unique_ptr<Plan> fwd_f, fwd_g, inv;
  {
    std::lock_guard lock(planner_mutex());
    fwd_f = std::make_unique<Plan>(fftw_plan_dft_r2c(static_cast<int>(d), dims.data(), buf_f.get(),
                                                     spec_f.get(), FFTW_ESTIMATE));
    fwd_g = std::make_unique<Plan>(fftw_plan_dft_r2c(static_cast<int>(d), dims.data(), buf_g.get(),
                                                     spec_g.get(), FFTW_ESTIMATE));
    inv = std::make_unique<Plan>(fftw_plan_dft_c2r(static_cast<int>(d), dims.data(), spec_f.get(),
                                                   buf_f.get(), FFTW_ESTIMATE));
  }

  const auto strides = strides_of(n);
  std::fill(buf_f.get(), buf_f.get() + real_size, 0.0);
  std::fill(buf_g.get(), buf_g.get() + real_size, 0.0);
  const auto off_f = offsets_in(f.spec(), strides);
  const auto off_g = offsets_in(g.spec(), strides);
  for (std::size_t i = 0; i < off_f.size(); ++i) buf_f[off_f[i]] = f[i];
  for (std::size_t j = 0; j < off_g.size(); ++j) buf_g[off_g[j]] = g[j];

  fwd_f->execute();
  fwd_g->execute();
  for (std::size_t k = 0; k < complex_size; ++k) {
    const double re = spec_f[k][0] * spec_g[k][0] - spec_f[k][1] * spec_g[k][1];
    const double im = spec_f[k][0] * spec_g[k][1] + spec_f[k][1] * spec_g[k][0];
    spec_f[k][0] = re;
    spec_f[k][1] = im;
  }
  inv->execute();

  const double scale = 1.0 / static_cast<double>(real_size);
  std::vector<double> acc(real_size);
  for (std::size_t k = 0; k < real_size; ++k) acc[k] = std::max(0.0, buf_f[k] * scale);
  return acc;
}

}  // namespace

GridSpec sum_spec(const GridSpec& f, const GridSpec& g) {
  check_compatible(f, g, "convolve");
  std::vector<Interval> extents(f.dim());
  std::vector<std::size_t> counts(f.dim());
  for (std::size_t a = 0; a < f.dim(); ++a) {
    const double half = 0.5 * f.cell_width(a);
    extents[a] = {f.extents()[a].lo + g.extents()[a].lo + half,
                  f.extents()[a].hi + g.extents()[a].hi - half};
    counts[a] = f.counts()[a] + g.counts()[a] - 1;
  }
  return GridSpec(std::move(extents), std::move(counts));
}

GridDensity convolve(const GridDensity& f, const GridDensity& g, ConvolutionMethod method) {
  GridSpec out = sum_spec(f.spec(), g.spec());
  if (method == ConvolutionMethod::automatic) {
    const double work = static_cast<double>(f.spec().size()) * static_cast<double>(g.spec().size());
    method = work <= 4.0e6 ? ConvolutionMethod::direct : ConvolutionMethod::fft;
  }
  std::vector<double> acc = method == ConvolutionMethod::direct ? convolve_direct(f, g, out)
                                                                : convolve_fft(f, g, out);
  const double cv = f.spec().cell_volume();
  for (double& x : acc) x *= cv;
  return GridDensity(std::move(out), std::move(acc));
}

GridDensity sum_density(std::span<const GridDensity> fs, ConvolutionMethod method) {
  if (fs.empty()) throw PreconditionError("sum_density needs at least one density");
  GridDensity acc = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) acc = convolve(acc, fs[i], method);
  return acc;
}

RegionMask resample_mask(const RegionMask& s, const GridSpec& target) {
  if (s.spec() == target) return s;
  if (s.spec().dim() != target.dim()) throw ShapeError("resample_mask: dimension mismatch");
  const GridSpec& src = s.spec();
  const std::size_t d = target.dim();
  std::vector<std::uint8_t> inc(target.size(), 0);
  std::vector<std::size_t> idx(d), sidx(d);
  for (std::size_t i = 0; i < target.size(); ++i) {
    target.unravel(i, idx);
    bool inside = true;
    for (std::size_t a = 0; a < d && inside; ++a) {
      const double x = target.center(a, idx[a]);
      const double u = std::floor((x - src.extents()[a].lo) / src.cell_width(a));
      if (u < 0.0 || u >= static_cast<double>(src.counts()[a])) {
        inside = false;
      } else {
        sidx[a] = static_cast<std::size_t>(u);
      }
    }
    if (inside) inc[i] = s.contains(src.ravel(sidx)) ? 1 : 0;
  }
  return RegionMask(target, std::move(inc));
}

double small_ball_prob(std::span<const GridDensity> fs, const RegionMask& s) {
  const GridDensity sum = sum_density(fs);
  check_compatible(sum.spec(), s.spec(), "small_ball_prob");
  return mass_on(sum, resample_mask(s, sum.spec()));
}

SmallBallBracket small_ball_bracket(std::span<const GridDensity> fs, const RegionMask& s) {
  return small_ball_bracket(sum_density(fs), fs.size(), s);
}

SmallBallBracket small_ball_bracket(const GridDensity& sum, std::size_t summands, const RegionMask& s) {
  check_compatible(sum.spec(), s.spec(), "small_ball_prob");
  const GridSpec& grid = sum.spec();
  const GridSpec& src = s.spec();
  const std::size_t d = grid.dim();
  const RegionMask resampled = resample_mask(s, grid);

  constexpr double kEdge = 1e-9;  // in cells; boxes touching a cell face do not enter it
  std::vector<std::size_t> idx(d), lo(d), hi(d), cur(d);
  CompensatedSum value, lower, upper;
  for (std::size_t z = 0; z < grid.size(); ++z) {
    const double mass = sum[z];
    if (mass == 0.0) continue;
    if (resampled.contains(z)) value.add(mass);
    grid.unravel(z, idx);

    bool inside_grid = true;
    bool empty = false;
    for (std::size_t a = 0; a < d; ++a) {
      const double half = 0.5 * static_cast<double>(summands) * grid.cell_width(a);
      const double c = grid.center(a, idx[a]);
      const double w = src.cell_width(a);
      const double first = std::floor((c - half - src.extents()[a].lo) / w + kEdge);
      const double last = std::ceil((c + half - src.extents()[a].lo) / w - kEdge) - 1.0;
      const double n = static_cast<double>(src.counts()[a]);
      if (first < 0.0 || last >= n) inside_grid = false;
      const double cf = std::max(first, 0.0);
      const double cl = std::min(last, n - 1.0);
      if (cf > cl) empty = true;
      lo[a] = static_cast<std::size_t>(cf);
      hi[a] = cl < 0.0 ? 0 : static_cast<std::size_t>(cl);
    }
    if (empty) continue;

    bool all = inside_grid;
    bool any = false;
    cur = lo;
    while (true) {
      const bool in = s.contains(src.ravel(cur));
      any = any || in;
      all = all && in;
      if (any && !all) break;
      std::size_t a = d;
      while (a-- > 0) {
        if (cur[a] < hi[a]) {
          ++cur[a];
          break;
        }
        cur[a] = lo[a];
      }
      if (a == static_cast<std::size_t>(-1)) break;
    }
    if (all) lower.add(mass);
    if (any) upper.add(mass);
  }
  const double cv = grid.cell_volume();
  return {value.value() * cv, lower.value() * cv, upper.value() * cv, resampled.measure()};
}

// ---------------------------------------------------------------------------

namespace {

template <typename Pick>
GridDensity box_filter(const GridDensity& f, std::size_t radius, Pick pick) {
  if (radius == 0) return f;
  const GridSpec& spec = f.spec();
  const auto strides = strides_of(spec.counts());
  std::vector<double> cur = f.values();
  std::vector<double> next(cur.size());
  std::vector<std::size_t> idx(spec.dim());
  for (std::size_t a = 0; a < spec.dim(); ++a) {
    const auto n = static_cast<std::ptrdiff_t>(spec.counts()[a]);
    const auto r = static_cast<std::ptrdiff_t>(radius);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      spec.unravel(i, idx);
      const auto p = static_cast<std::ptrdiff_t>(idx[a]);
      double acc = cur[i];
      if (p - r < 0 || p + r >= n) acc = pick(acc, 0.0);
      for (std::ptrdiff_t q = std::max<std::ptrdiff_t>(0, p - r); q <= std::min(n - 1, p + r); ++q) {
        acc = pick(acc, cur[i + static_cast<std::size_t>(q - p) * strides[a]]);
      }
      next[i] = acc;
    }
    std::swap(cur, next);
  }
  return GridDensity(spec, std::move(cur));
}

}  // namespace

GridDensity max_filter(const GridDensity& f, std::size_t radius) {
  return box_filter(f, radius, [](double a, double b) { return std::max(a, b); });
}

GridDensity min_filter(const GridDensity& f, std::size_t radius) {
  return box_filter(f, radius, [](double a, double b) { return std::min(a, b); });
}

GridDensity pad(const GridDensity& f, std::size_t cells) {
  if (cells == 0) return f;
  const GridSpec& spec = f.spec();
  std::vector<Interval> extents(spec.dim());
  std::vector<std::size_t> counts(spec.dim());
  for (std::size_t a = 0; a < spec.dim(); ++a) {
    const double w = spec.cell_width(a);
    const double grow = static_cast<double>(cells) * w;
    extents[a] = {spec.extents()[a].lo - grow, spec.extents()[a].hi + grow};
    counts[a] = spec.counts()[a] + 2 * cells;
  }
  GridSpec out(std::move(extents), std::move(counts));
  const auto strides = strides_of(out.counts());
  std::size_t shift = 0;
  for (std::size_t a = 0; a < spec.dim(); ++a) shift += cells * strides[a];
  const auto off = offsets_in(spec, strides);
  std::vector<double> v(out.size(), 0.0);
  for (std::size_t i = 0; i < off.size(); ++i) v[off[i] + shift] = f[i];
  return GridDensity(std::move(out), std::move(v));
}

}  // namespace smallball
