#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qrdm/beable.hpp"
#include "qrdm/collapse.hpp"
#include "qrdm/frames.hpp"
#include "qrdm/hilbert.hpp"
#include "qrdm/rdm.hpp"
#include "qrdm/schrodinger.hpp"

namespace qrdm::io {

// States and operators as JSON arrays of [re, im] pairs.
std::string state_to_json(const ComplexVectorState& s);
ComplexVectorState state_from_json(const std::string& text);
std::string operator_to_json(const HermitianOperator& op);
HermitianOperator operator_from_json(const std::string& text);

// Header block of '#'-prefixed metadata lines, then x,re,im,rho,j rows.
void write_snapshot_csv(std::ostream& out, const GridWavefunction& psi);
void write_snapshot_json(std::ostream& out, const GridWavefunction& psi);

void write_trajectory_csv(std::ostream& out, const StayTrajectory& t);
void write_trajectory_csv(std::ostream& out, const PairedStayTrajectory& t);

// Binary run layout, little endian:
//   char[8] magic "QRDMSTAY", u32 version (1), u32 dims (index columns: 1 single, 2 paired),
//   u64 seed, u64 instants, f64 dt_instant, u32 has_branches,
//   then per instant: dims x u32 site indices, followed by a u8 branch label when has_branches.
void write_trajectory_binary(std::ostream& out, const StayTrajectory& t);
void write_trajectory_binary(std::ostream& out, const PairedStayTrajectory& t);
StayTrajectory read_trajectory_binary(std::istream& in);
PairedStayTrajectory read_paired_trajectory_binary(std::istream& in);

void write_events_csv(std::ostream& out, const std::vector<Event>& events);

void write_collapse_trajectory_csv(std::ostream& out, const CollapseTrajectory& t);
void write_ensemble_json(std::ostream& out, const std::vector<EnsembleSlice>& slices);
void write_ensemble_csv(std::ostream& out, const std::vector<EnsembleSlice>& slices);
void write_calculator_csv(std::ostream& out, const std::vector<CalculatorRow>& rows);
void write_equivariance_json(std::ostream& out, const EquivarianceReport& report);

// Shortest round-trip representation.
std::string format_double(double v);

}  // namespace qrdm::io
