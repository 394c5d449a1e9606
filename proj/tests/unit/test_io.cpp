#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "qrdm/errors.hpp"
#include "qrdm/io.hpp"

using namespace qrdm;

TEST(Json, StateRoundTrip) {
  const auto s = ComplexVectorState::from({Complex(0.6, 0.0), Complex(0.0, 0.8)});
  const auto back = io::state_from_json(io::state_to_json(s));
  EXPECT_EQ(back.amplitudes(), s.amplitudes());
}

TEST(Json, BareNumbersAreReal) {
  const auto s = io::state_from_json("[0.6, [0, 0.8]]");
  EXPECT_EQ(s[0], Complex(0.6, 0));
  EXPECT_EQ(s[1], Complex(0, 0.8));
}

TEST(Json, OperatorRoundTrip) {
  ComplexMatrix m(2, 2);
  m << 1.0, Complex(0, -0.5), Complex(0, 0.5), -2.0;
  const HermitianOperator a(m);
  EXPECT_EQ(io::operator_from_json(io::operator_to_json(a)).matrix(), m);
}

TEST(Json, MalformedInput) {
  EXPECT_THROW(io::state_from_json("[0.6, "), DomainError);
  EXPECT_THROW(io::state_from_json("[]"), DimensionMismatch);
  EXPECT_THROW(io::state_from_json("[1, 1]"), NormalizationError);
  EXPECT_THROW(io::operator_from_json("[[1, 0]]"), DimensionMismatch);
  EXPECT_THROW(io::state_from_json("[[1, 0, 0]]"), DomainError);
}

TEST(Binary, SingleRoundTrip) {
  StayTrajectory t{{3, 1, 4, 1, 5, 9, 2, 6}, 0.25, 77};
  std::stringstream buf;
  io::write_trajectory_binary(buf, t);
  EXPECT_EQ(buf.str().size(), 8 + 4 + 4 + 8 + 8 + 8 + 4 + 8 * 4u);
  const auto back = io::read_trajectory_binary(buf);
  EXPECT_EQ(back.stays, t.stays);
  EXPECT_EQ(back.dt_instant, 0.25);
  EXPECT_EQ(back.seed, 77u);
}

TEST(Binary, PairedRoundTripAndKindCheck) {
  PairedStayTrajectory t{{1, 2, 3}, {7, 8, 9}, {0, 1, 1}, 1.5, 5};
  std::stringstream buf;
  io::write_trajectory_binary(buf, t);
  const std::string bytes = buf.str();
  const auto back = io::read_paired_trajectory_binary(buf);
  EXPECT_EQ(back.stays1, t.stays1);
  EXPECT_EQ(back.stays2, t.stays2);
  EXPECT_EQ(back.branches, t.branches);
  std::stringstream again(bytes);
  EXPECT_THROW(io::read_trajectory_binary(again), DimensionMismatch);
  std::stringstream junk("NOTASTAYFILE....");
  EXPECT_THROW(io::read_trajectory_binary(junk), DomainError);
}

TEST(Binary, TruncatedFile) {
  StayTrajectory t{{3, 1, 4}, 1.0, 1};
  std::stringstream buf;
  io::write_trajectory_binary(buf, t);
  std::stringstream cut(buf.str().substr(0, buf.str().size() - 2));
  EXPECT_THROW(io::read_trajectory_binary(cut), DomainError);
}

TEST(Csv, SnapshotHeaderAndRows) {
  const GridSpec spec{-1.0, 0.25};
  const auto psi = plane_wave(spec, 8, 0.0);
  std::ostringstream out;
  io::write_snapshot_csv(out, psi);
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("# x0=-1\n# dx=0.25\n", 0), 0u);
  EXPECT_NE(s.find("x,re,im,rho,j\n"), std::string::npos);
  EXPECT_NE(s.find("\n-1,0.70710678118654"), std::string::npos);
  std::size_t rows = 0;
  for (char ch : s) rows += ch == '\n';
  EXPECT_EQ(rows, 6u + 8u);
}

TEST(Csv, TrajectoryLayouts) {
  std::ostringstream a;
  io::write_trajectory_csv(a, StayTrajectory{{4, 2}, 0.5, 3});
  EXPECT_EQ(a.str(), "# seed=3\n# dt=0.5\ninstant,t,site\n0,0,4\n1,0.5,2\n");
  std::ostringstream b;
  io::write_trajectory_csv(b, PairedStayTrajectory{{1}, {2}, {1}, 1.0, 0});
  EXPECT_EQ(b.str(), "# seed=0\n# dt=1\ninstant,t,site1,site2,branch\n0,0,1,2,d\n");
}

TEST(Csv, EventsAndCalculator) {
  std::ostringstream e;
  io::write_events_csv(e, {{0.5, -1.0, "S"}, {1.0, 2.0, "S'"}});
  EXPECT_EQ(e.str(), "t,x,frame\n0.5,-1,S\n1,2,S'\n");
  std::ostringstream c;
  io::write_calculator_csv(c, {{"squid", 8.6e-6, 1e23, 1e23, 1.0, 0}});
  EXPECT_EQ(c.str(), "name,delta_e_ev,tau_c_s,reference_s,ratio,decade_gap\nsquid,8.6e-06,1e+23,1e+23,1,0\n");
}

TEST(Format, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3, 6.582119569e-16, -2.5e300, 0.0}) EXPECT_EQ(std::stod(io::format_double(v)), v);
  EXPECT_EQ(io::format_double(0.1), "0.1");
}
