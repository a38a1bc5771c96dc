#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rydcav/config.hpp"
#include "rydcav/params.hpp"

namespace rydcav {

// Ensemble lattice plus the qubit atom. Lengths in um.
struct GateGeometry {
  std::array<int, 3> dims{1, 1, 1};
  double spacing = 0.0;
  Eigen::Vector3d qubit_position = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector3d> atom_positions;
};

// Sites at integer multiples of `spacing`, centered on the origin; the qubit
// sits qubit_offset_sites * spacing above the top layer center along +z.
GateGeometry build_geometry(std::array<int, 3> dims, double spacing_um,
                            double qubit_offset_sites);

// V = c3 f(theta) / r^3. theta is the polar angle of the atom as seen from
// the qubit, measured from the lattice normal. An empty table means f = 1;
// otherwise f is interpolated linearly in theta and clamped at the ends.
struct ForsterModel {
  double c3 = 0.0;  // rad/us um^3
  std::vector<std::pair<double, double>> angular_table;  // (theta rad, factor)

  double factor(double theta) const;
};

std::vector<cplx> forster_coupling(const GateGeometry& geom, const ForsterModel& model);

struct GateQuantities {
  cplx delta_ac;
  cplx eta;
  cplx delta_dr;
  std::vector<cplx> b_m;
};

// blockade_sign (+1 or -1) multiplies every B_m.
GateQuantities gate_quantities(const PhysicalParams& p, double delta,
                               std::span<const cplx> v_m, int blockade_sign = 1);

// Reflection with the qubit in |r'>. Per-atom couplings default to the
// uniform g_single (or g_collective / sqrt(n_atoms) when unset); v_m must
// hold one entry per ensemble atom.
cplx reflection_blocked(const PhysicalParams& p, double delta, std::span<const cplx> v_m,
                        int blockade_sign = 1, std::span<const cplx> g_m = {});

cplx reflection_unblocked(const PhysicalParams& p, double delta);

double fidelity(cplx r_unblocked, cplx r_blocked);

// Delta_r that zeroes Re(Delta_dr) at delta = 0.
PhysicalParams auto_two_photon_resonance(const PhysicalParams& p);

struct ResonanceSearch {
  PhysicalParams params;
  double analytic_delta_r = 0.0;
  double fidelity_analytic = 0.0;
  double fidelity = 0.0;
  bool bracket_failed = false;
};

// Starts from the analytic Delta_r and maximizes F_z(delta = 0) over
// Delta_r with a grid scan and Brent's method. The analytic value is kept
// when the search cannot bracket an interior maximum or does no better.
ResonanceSearch refine_two_photon_resonance(const PhysicalParams& p, std::span<const cplx> v_m,
                                            int blockade_sign = 1);

struct GateOptions {
  double delta = 0.0;  // probe offset, rad/us
  int blockade_sign = 1;
  bool auto_resonance = true;
  bool refine_resonance = false;
};

struct GatePoint {
  PhysicalParams params;  // after any resonance adjustment
  cplx r_unblocked{0.0, 0.0};
  cplx r_blocked{0.0, 0.0};
  double fidelity = 0.0;
  std::string status = "ok";  // ok | singular | singular_elimination | bracket_failed
};

GatePoint evaluate_gate(PhysicalParams p, std::span<const cplx> v_m, const GateOptions& options);

// One axis of a grid scan. `key` is a physics config key (values in MHz,
// like the config) or "probe_delta" for the probe offset.
struct ScanAxis {
  std::string key;
  std::vector<double> values;
};

// "name start stop count", inclusive linear spacing.
ScanAxis parse_scan_axis(std::string_view text);

struct ScanTable {
  std::vector<std::string> axis_names;
  std::vector<std::vector<double>> axis_values;  // per row
  std::vector<GatePoint> points;
};

// Row-major grid (last axis fastest). Rows come out in grid order for any
// worker count; singular points become rows with a status flag.
ScanTable scan(const Config& base, const std::vector<ScanAxis>& axes,
               std::span<const cplx> v_m, const GateOptions& options, unsigned workers = 1);

// Header: <axes>,re_R_unblocked,im_R_unblocked,re_R_blocked,im_R_blocked,F_z,status
void write_scan_csv(std::ostream& out, const ScanTable& table);

// Header: x_um,y_um,z_um,distance_um,abs_v_mhz
void write_geometry_csv(std::ostream& out, const GateGeometry& geom, std::span<const cplx> v_m);

}  // namespace rydcav
