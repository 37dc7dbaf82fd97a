#include "qtt/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace qtt {

// The format writes raw doubles; a big-endian host would need byte swaps
// that nothing here performs.
static_assert(std::endian::native == std::endian::little,
              "state files are little-endian");

namespace {

constexpr char kMagic[8] = {'Q', 'T', 'T', 'M', 'P', 'S', '0', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kScalarFloat64 = 0;

void put_u8(std::ostream& out, std::uint8_t v) {
  out.put(static_cast<char>(v));
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.write(buf, 4);
}

void put_f64(std::ostream& out, double v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.write(buf, 8);
}

std::uint8_t get_u8(std::istream& in) {
  char c;
  if (!in.get(c)) throw std::runtime_error("load_mps: truncated file");
  return static_cast<std::uint8_t>(c);
}

std::uint32_t get_u32(std::istream& in) {
  char buf[4];
  if (!in.read(buf, 4)) throw std::runtime_error("load_mps: truncated file");
  std::uint32_t v;
  std::memcpy(&v, buf, 4);
  return v;
}

double get_f64(std::istream& in) {
  char buf[8];
  if (!in.read(buf, 8)) throw std::runtime_error("load_mps: truncated file");
  double v;
  std::memcpy(&v, buf, 8);
  return v;
}

}  // namespace

void save_mps(const MPS& m, std::ostream& out) {
  m.validate();
  out.write(kMagic, 8);
  put_u32(out, kVersion);
  put_u8(out, kScalarFloat64);
  put_u32(out, static_cast<std::uint32_t>(m.size()));
  put_u8(out, m.meta ? 1 : 0);
  if (m.meta) {
    put_u32(out, static_cast<std::uint32_t>(m.meta->dims()));
    for (int d = 0; d < m.meta->dims(); ++d) {
      put_u32(out, static_cast<std::uint32_t>(m.meta->qubits[d]));
      put_f64(out, m.meta->intervals[d].a);
      put_f64(out, m.meta->intervals[d].b);
    }
    put_u8(out, m.meta->order == QubitOrder::Interleaved ? 1 : 0);
  }
  for (int i = 0; i < m.size(); ++i) {
    const int cl = m.chi_left(i), cr = m.chi_right(i);
    put_u32(out, static_cast<std::uint32_t>(cl));
    put_u32(out, static_cast<std::uint32_t>(cr));
    // row-major (chi_left, 2, chi_right), matching the left unfolding
    for (int a = 0; a < cl; ++a)
      for (int s = 0; s < 2; ++s)
        for (int b = 0; b < cr; ++b) put_f64(out, m.cores[i][s](a, b));
  }
  if (!out) throw std::runtime_error("save_mps: write failed");
}

void save_mps(const MPS& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_mps: cannot open " + path);
  save_mps(m, out);
}

MPS load_mps(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("load_mps: not a state file");
  if (get_u32(in) != kVersion)
    throw std::runtime_error("load_mps: unsupported version");
  if (get_u8(in) != kScalarFloat64)
    throw std::runtime_error("load_mps: unsupported scalar kind");
  const std::uint32_t n = get_u32(in);
  if (n < 1 || n > 4096) throw std::runtime_error("load_mps: bad site count");
  std::optional<DomainMeta> meta;
  if (get_u8(in) != 0) {
    DomainMeta dm;
    const std::uint32_t dims = get_u32(in);
    if (dims < 1 || dims > n) throw std::runtime_error("load_mps: bad dims");
    for (std::uint32_t d = 0; d < dims; ++d) {
      dm.qubits.push_back(static_cast<int>(get_u32(in)));
      Interval iv;
      iv.a = get_f64(in);
      iv.b = get_f64(in);
      dm.intervals.push_back(iv);
    }
    dm.order = get_u8(in) != 0 ? QubitOrder::Interleaved : QubitOrder::Serial;
    dm.validate();
    meta = std::move(dm);
  }
  std::vector<MPS::Core> cores;
  cores.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t cl = get_u32(in);
    const std::uint32_t cr = get_u32(in);
    if (cl < 1 || cr < 1 || cl > (1u << 20) || cr > (1u << 20))
      throw std::runtime_error("load_mps: bad bond dimension");
    MPS::Core core{Eigen::MatrixXd(cl, cr), Eigen::MatrixXd(cl, cr)};
    for (std::uint32_t a = 0; a < cl; ++a)
      for (int s = 0; s < 2; ++s)
        for (std::uint32_t b = 0; b < cr; ++b) core[s](a, b) = get_f64(in);
    cores.push_back(std::move(core));
  }
  try {
    return MPS(std::move(cores), std::move(meta));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("load_mps: ") + e.what());
  }
}

MPS load_mps(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_mps: cannot open " + path);
  return load_mps(in);
}

nlohmann::json to_json(const ChebyshevExpansion& e) {
  return nlohmann::json{
      {"interval", {e.interval.a, e.interval.b}},
      {"node_kind", e.nodes == NodeKind::Gauss ? "gauss" : "lobatto"},
      {"coefficients", e.coeffs}};
}

ChebyshevExpansion expansion_from_json(const nlohmann::json& j) {
  ChebyshevExpansion e;
  const auto& iv = j.at("interval");
  e.interval = Interval{iv.at(0).get<double>(), iv.at(1).get<double>()};
  const std::string kind = j.at("node_kind").get<std::string>();
  if (kind == "gauss")
    e.nodes = NodeKind::Gauss;
  else if (kind == "lobatto")
    e.nodes = NodeKind::Lobatto;
  else
    throw std::runtime_error("expansion_from_json: unknown node_kind " + kind);
  e.coeffs = j.at("coefficients").get<std::vector<double>>();
  if (e.coeffs.empty())
    throw std::runtime_error("expansion_from_json: empty coefficients");
  return e;
}

nlohmann::json to_json(const CrossDiagnostics& d) {
  const char* names[] = {"converged", "saturated", "max_sweeps"};
  return nlohmann::json{
      {"halt", names[static_cast<int>(d.halt)]},
      {"sweeps", d.sweeps},
      {"eval_count", d.eval_count},
      {"bond_profile_per_sweep", d.bond_profile_per_sweep},
      {"sampled_error_per_sweep", d.sampled_error_per_sweep}};
}

}  // namespace qtt
