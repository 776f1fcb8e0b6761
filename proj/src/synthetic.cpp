#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <numbers>

#include "dpsn/error.hpp"
#include "dpsn/rng.hpp"
#include "dpsn/structure_io.hpp"

namespace dpsn {
namespace {

struct Vec3 {
  double x, y, z;
};

Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
Vec3 normalized(Vec3 a) { return (1.0 / std::sqrt(dot(a, a))) * a; }

constexpr double kBond = 3.8;  // consecutive C-alpha spacing
constexpr std::array<const char*, 4> kFamilies = {"helix", "extended", "alternating", "meander"};

Vec3 random_direction(SplitMix64& rng) {
  for (;;) {
    Vec3 v{rng.normal(), rng.normal(), rng.normal()};
    if (dot(v, v) > 1e-6) return normalized(v);
  }
}

// Orthonormal frame (axis, e1, e2) around `axis`.
std::array<Vec3, 3> frame(Vec3 axis) {
  Vec3 helper = std::abs(axis.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 e1 = normalized(cross(axis, helper));
  return {axis, e1, cross(axis, e1)};
}

// Alpha-helix-like coil: radius 2.3, 100 degrees and 1.5 rise per residue,
// giving ~3.8 between neighbours and contacts up to i+3.
void append_helix(std::vector<Vec3>& pts, Vec3 start, Vec3 axis, std::size_t count) {
  const auto [a, e1, e2] = frame(axis);
  const double radius = 2.3;
  const double turn = 100.0 * std::numbers::pi / 180.0;
  const Vec3 base = start + (-radius) * e1;
  for (std::size_t k = 0; k < count; ++k) {
    const double th = turn * static_cast<double>(k);
    pts.push_back(base + (radius * std::cos(th)) * e1 + (radius * std::sin(th)) * e2 +
                  (1.5 * static_cast<double>(k)) * a);
  }
}

void append_strand(std::vector<Vec3>& pts, Vec3 start, Vec3 dir, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) pts.push_back(start + (kBond * static_cast<double>(k)) * dir);
}

std::vector<Vec3> backbone(std::size_t family, std::size_t variant, std::size_t n, SplitMix64& rng) {
  std::vector<Vec3> pts;
  pts.reserve(n);
  switch (family) {
    case 0:
      append_helix(pts, {0, 0, 0}, {0, 0, 1}, n);
      break;
    case 1:
      append_strand(pts, {0, 0, 0}, {1, 0, 0}, n);
      break;
    case 2: {
      const std::size_t helix_len = 8 + 2 * variant;
      const std::size_t strand_len = 5 + variant;
      bool helix = true;
      Vec3 dir{0, 0, 1};
      while (pts.size() < n) {
        const std::size_t len = std::min(helix ? helix_len : strand_len, n - pts.size());
        const Vec3 start = pts.empty() ? Vec3{0, 0, 0} : pts.back() + kBond * dir;
        if (helix)
          append_helix(pts, start, dir, len);
        else
          append_strand(pts, start, dir, len);
        dir = random_direction(rng);
        helix = !helix;
      }
      break;
    }
    default: {
      // Antiparallel meander: strands 4.8 apart, 3.3 rise with a 0.9 pleat.
      const std::size_t strand_len = 6 + variant;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t s = i / strand_len;
        const std::size_t k = i % strand_len;
        const double along = 3.3 * static_cast<double>(s % 2 == 0 ? k : strand_len - 1 - k);
        pts.push_back({along, 4.8 * static_cast<double>(s), (i % 2 == 0) ? 0.9 : -0.9});
      }
      break;
    }
  }
  pts.resize(n);
  return pts;
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

}  // namespace

std::string synthetic_class_label(std::size_t c) {
  std::string label = kFamilies[c % kFamilies.size()];
  if (c >= kFamilies.size()) label += "_v" + std::to_string(c / kFamilies.size() + 1);
  return label;
}

std::vector<ProteinDomain> generate_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.classes < 2) throw PreconditionError("synthetic corpus needs at least 2 classes");
  if (spec.per_class < spec.class_floor)
    throw PreconditionError("per_class " + std::to_string(spec.per_class) + " below class floor " +
                            std::to_string(spec.class_floor));
  if (spec.min_length < 1 || spec.min_length > spec.max_length)
    throw PreconditionError("invalid length range");

  static constexpr char kAlphabet[] = "ACDEFGHIKLMNPQRSTVWY";
  SplitMix64 rng(spec.seed);
  std::vector<ProteinDomain> out;
  out.reserve(spec.classes * spec.per_class);
  for (std::size_t c = 0; c < spec.classes; ++c) {
    const std::string label = synthetic_class_label(c);
    for (std::size_t k = 0; k < spec.per_class; ++k) {
      const std::size_t n =
          spec.min_length + static_cast<std::size_t>(rng.below(spec.max_length - spec.min_length + 1));
      const auto pts = backbone(c % kFamilies.size(), c / kFamilies.size(), n, rng);
      ProteinDomain d;
      char buf[16];
      std::snprintf(buf, sizeof buf, "%03zu", k);
      d.id = label + "_" + buf;
      d.label = label;
      d.residues.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        Residue r;
        r.index = static_cast<int>(i) + 1;
        r.aa = kAlphabet[rng.below(20)];
        r.x = round3(pts[i].x + spec.jitter * rng.normal());
        r.y = round3(pts[i].y + spec.jitter * rng.normal());
        r.z = round3(pts[i].z + spec.jitter * rng.normal());
        d.residues.push_back(r);
      }
      out.push_back(std::move(d));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ProteinDomain& a, const ProteinDomain& b) { return a.id < b.id; });
  return out;
}

}  // namespace dpsn
