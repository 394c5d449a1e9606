#include "qrdm/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include "json.hpp"
#include <ostream>

#include "qrdm/errors.hpp"

namespace qrdm::io {

using nlohmann::json;

namespace {

json complex_array(const ComplexVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
  return a;
}

Complex parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw DomainError("expected [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("malformed JSON: ") + e.what());
  }
}

template <class T>
void put(std::ostream& out, T v) {
  std::array<char, sizeof(T)> b{};
  std::memcpy(b.data(), &v, sizeof(T));
  out.write(b.data(), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> b{};
  if (!in.read(b.data(), sizeof(T))) throw DomainError("truncated trajectory file");
  T v;
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

constexpr char kMagic[8] = {'Q', 'R', 'D', 'M', 'S', 'T', 'A', 'Y'};

struct BinaryHeader {
  std::uint32_t dims = 1;
  std::uint64_t seed = 0;
  std::uint64_t instants = 0;
  double dt = 1;
  bool branches = false;
};

void write_header(std::ostream& out, const BinaryHeader& h) {
  out.write(kMagic, 8);
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, h.dims);
  put<std::uint64_t>(out, h.seed);
  put<std::uint64_t>(out, h.instants);
  put<double>(out, h.dt);
  put<std::uint32_t>(out, h.branches ? 1 : 0);
}

BinaryHeader read_header(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw DomainError("not a stay trajectory file");
  if (get<std::uint32_t>(in) != 1) throw DomainError("unsupported trajectory file version");
  BinaryHeader h;
  h.dims = get<std::uint32_t>(in);
  h.seed = get<std::uint64_t>(in);
  h.instants = get<std::uint64_t>(in);
  h.dt = get<double>(in);
  h.branches = get<std::uint32_t>(in) != 0;
  return h;
}

json slice_json(const EnsembleSlice& s) {
  json pp = json::array();
  for (Eigen::Index i = 0; i < s.mean_pp.rows(); ++i)
    for (Eigen::Index j = i + 1; j < s.mean_pp.cols(); ++j)
      pp.push_back({{"i", i}, {"j", j}, {"mean", s.mean_pp(i, j)}, {"se", s.se_pp(i, j)}});
  return {{"step", s.step}, {"mean_p", s.mean_p}, {"se_p", s.se_p}, {"pp", pp}};
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

std::string state_to_json(const ComplexVectorState& s) { return complex_array(s.amplitudes()).dump(); }

ComplexVectorState state_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_array() || j.empty()) throw DimensionMismatch("state JSON must be a non-empty array");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_complex(j[i]);
  return ComplexVectorState(std::move(v));
}

std::string operator_to_json(const HermitianOperator& op) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < op.matrix().rows(); ++r) rows.push_back(complex_array(op.matrix().row(r).transpose()));
  return rows.dump();
}

HermitianOperator operator_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_array() || j.empty()) throw DimensionMismatch("operator JSON must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  ComplexMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw DimensionMismatch("operator must be square");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = parse_complex(row[static_cast<std::size_t>(c)]);
  }
  return HermitianOperator(std::move(m));
}

void write_snapshot_csv(std::ostream& out, const GridWavefunction& psi) {
  const auto rho = position_density(psi);
  const auto j = flux_density(psi);
  out << "# x0=" << format_double(psi.x0()) << "\n# dx=" << format_double(psi.dx())
      << "\n# mass=" << format_double(psi.mass()) << "\n# hbar=" << format_double(psi.hbar())
      << "\n# samples=" << psi.size() << "\nx,re,im,rho,j\n";
  for (std::size_t k = 0; k < psi.size(); ++k)
    out << format_double(psi.x(k)) << ',' << format_double(psi[k].real()) << ',' << format_double(psi[k].imag())
        << ',' << format_double(rho[k]) << ',' << format_double(j[k]) << '\n';
}

void write_snapshot_json(std::ostream& out, const GridWavefunction& psi) {
  json re = json::array(), im = json::array();
  for (const auto& c : psi.samples()) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  const json doc{{"x0", psi.x0()},   {"dx", psi.dx()},   {"mass", psi.mass()},
                 {"hbar", psi.hbar()}, {"re", re},        {"im", im},
                 {"rho", position_density(psi)}, {"j", flux_density(psi)}};
  out << doc.dump(2) << '\n';
}

void write_trajectory_csv(std::ostream& out, const StayTrajectory& t) {
  out << "# seed=" << t.seed << "\n# dt=" << format_double(t.dt_instant) << "\ninstant,t,site\n";
  for (std::size_t i = 0; i < t.instants(); ++i)
    out << i << ',' << format_double(t.dt_instant * static_cast<double>(i)) << ',' << t.stays[i] << '\n';
}

void write_trajectory_csv(std::ostream& out, const PairedStayTrajectory& t) {
  out << "# seed=" << t.seed << "\n# dt=" << format_double(t.dt_instant) << "\ninstant,t,site1,site2,branch\n";
  for (std::size_t i = 0; i < t.instants(); ++i)
    out << i << ',' << format_double(t.dt_instant * static_cast<double>(i)) << ',' << t.stays1[i] << ','
        << t.stays2[i] << ',' << (t.branches[i] == 0 ? 'u' : 'd') << '\n';
}

void write_trajectory_binary(std::ostream& out, const StayTrajectory& t) {
  write_header(out, {1, t.seed, t.instants(), t.dt_instant, false});
  for (auto s : t.stays) put<std::uint32_t>(out, s);
}

void write_trajectory_binary(std::ostream& out, const PairedStayTrajectory& t) {
  if (t.stays2.size() != t.instants() || t.branches.size() != t.instants())
    throw DimensionMismatch("paired trajectory columns differ");
  write_header(out, {2, t.seed, t.instants(), t.dt_instant, true});
  for (std::size_t i = 0; i < t.instants(); ++i) {
    put<std::uint32_t>(out, t.stays1[i]);
    put<std::uint32_t>(out, t.stays2[i]);
    put<std::uint8_t>(out, t.branches[i]);
  }
}

StayTrajectory read_trajectory_binary(std::istream& in) {
  const BinaryHeader h = read_header(in);
  if (h.dims != 1 || h.branches) throw DimensionMismatch("file holds a paired trajectory");
  StayTrajectory t;
  t.seed = h.seed;
  t.dt_instant = h.dt;
  t.stays.resize(h.instants);
  for (auto& s : t.stays) s = get<std::uint32_t>(in);
  return t;
}

PairedStayTrajectory read_paired_trajectory_binary(std::istream& in) {
  const BinaryHeader h = read_header(in);
  if (h.dims != 2) throw DimensionMismatch("file holds a single-particle trajectory");
  PairedStayTrajectory t;
  t.seed = h.seed;
  t.dt_instant = h.dt;
  t.stays1.resize(h.instants);
  t.stays2.resize(h.instants);
  t.branches.assign(h.instants, 0);
  for (std::size_t i = 0; i < h.instants; ++i) {
    t.stays1[i] = get<std::uint32_t>(in);
    t.stays2[i] = get<std::uint32_t>(in);
    if (h.branches) t.branches[i] = get<std::uint8_t>(in);
  }
  return t;
}

void write_events_csv(std::ostream& out, const std::vector<Event>& events) {
  out << "t,x,frame\n";
  for (const auto& e : events) out << format_double(e.t) << ',' << format_double(e.x) << ',' << e.frame << '\n';
}

void write_collapse_trajectory_csv(std::ostream& out, const CollapseTrajectory& t) {
  out << "# energies=";
  for (std::size_t i = 0; i < t.energies.size(); ++i) out << (i ? ";" : "") << format_double(t.energies[i]);
  out << "\n# outcome=" << (t.outcome ? std::to_string(*t.outcome) : std::string("none")) << "\nstep,staying";
  const std::size_t m = t.energies.size();
  for (std::size_t i = 0; i < m; ++i) out << ",p" << i;
  out << '\n';
  for (std::size_t s = 0; s < t.probabilities.size(); ++s) {
    out << s << ',';
    if (s > 0 && s - 1 < t.staying.size()) out << t.staying[s - 1];
    for (double p : t.probabilities[s]) out << ',' << format_double(p);
    out << '\n';
  }
}

void write_ensemble_json(std::ostream& out, const std::vector<EnsembleSlice>& slices) {
  json a = json::array();
  for (const auto& s : slices) a.push_back(slice_json(s));
  out << json{{"slices", a}}.dump(2) << '\n';
}

void write_ensemble_csv(std::ostream& out, const std::vector<EnsembleSlice>& slices) {
  out << "step,quantity,i,j,mean,se\n";
  for (const auto& s : slices) {
    for (std::size_t i = 0; i < s.mean_p.size(); ++i)
      out << s.step << ",p," << i << ",," << format_double(s.mean_p[i]) << ',' << format_double(s.se_p[i]) << '\n';
    for (Eigen::Index i = 0; i < s.mean_pp.rows(); ++i)
      for (Eigen::Index j = i + 1; j < s.mean_pp.cols(); ++j)
        out << s.step << ",pp," << i << ',' << j << ',' << format_double(s.mean_pp(i, j)) << ','
            << format_double(s.se_pp(i, j)) << '\n';
  }
}

void write_calculator_csv(std::ostream& out, const std::vector<CalculatorRow>& rows) {
  out << "name,delta_e_ev,tau_c_s,reference_s,ratio,decade_gap\n";
  for (const auto& r : rows)
    out << r.name << ',' << format_double(r.delta_e_ev) << ',' << format_double(r.tau_c_s) << ','
        << format_double(r.reference_s) << ',' << format_double(r.ratio) << ',' << r.decade_gap << '\n';
}

void write_equivariance_json(std::ostream& out, const EquivarianceReport& report) {
  json a = json::array();
  for (const auto& s : report.slices)
    a.push_back({{"step", s.step},
                 {"t", s.t},
                 {"expected", s.expected},
                 {"counts", s.counts},
                 {"chi2", s.chi2},
                 {"dof", s.dof},
                 {"p_value", s.p_value}});
  const double min_p = report.slices.empty() ? 1.0 : report.min_p_value();
  out << json{{"slices", a}, {"max_detailed_residual", report.max_detailed_residual}, {"min_p_value", min_p}}.dump(2)
      << '\n';
}

}  // namespace qrdm::io
