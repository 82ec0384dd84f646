#include "sdgsim/cell.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace sdg {

namespace {

constexpr double kResidualTolA = 1e-12;  // node current at a solved point
constexpr double kVoltTol = 1e-13;       // bracket width in scalar solves
constexpr double kStepClampV = 0.05;     // largest Newton move per iteration
constexpr double kSqrt2 = 1.4142135623730951;

// Signed channel current from terminal a to terminal b with the gate at
// vg, for either polarity. The device model wants its own source-referred
// frame, so orient by which terminal acts as the source, then map the
// partials back through the same change of variables.
struct BranchI {
  double i = 0.0;
  double di_dva = 0.0;
  double di_dvb = 0.0;
  double di_dvg = 0.0;
};

BranchI channel_current(const EffDevice& d, double va, double vb, double vg) {
  BranchI r;
  if (d.is_nmos) {
    if (va >= vb) {
      IdsResult s = drain_current_d(d, vg - vb, va - vb);
      r.i = s.i;
      r.di_dva = s.di_dvds;
      r.di_dvg = s.di_dvgs;
      r.di_dvb = -s.di_dvgs - s.di_dvds;
    } else {
      IdsResult s = drain_current_d(d, vg - va, vb - va);
      r.i = -s.i;
      r.di_dvb = -s.di_dvds;
      r.di_dvg = -s.di_dvgs;
      r.di_dva = s.di_dvgs + s.di_dvds;
    }
  } else {
    if (va >= vb) {
      IdsResult s = drain_current_d(d, va - vg, va - vb);
      r.i = s.i;
      r.di_dva = s.di_dvgs + s.di_dvds;
      r.di_dvg = -s.di_dvgs;
      r.di_dvb = -s.di_dvds;
    } else {
      IdsResult s = drain_current_d(d, vb - vg, vb - va);
      r.i = -s.i;
      r.di_dvb = -s.di_dvgs - s.di_dvds;
      r.di_dvg = s.di_dvgs;
      r.di_dva = s.di_dvds;
    }
  }
  // Gate leak rides along as a small drain-source conductance. Besides
  // matching the off-state budget it keeps every node weakly tied, so
  // all-off bias corners still have a unique DC answer.
  r.i += d.g_gate * (va - vb);
  r.di_dva += d.g_gate;
  r.di_dvb -= d.g_gate;
  return r;
}

struct NodeDerivs {
  double i = 0.0;
  double di_dq = 0.0;
  double di_dqz = 0.0;
};

NodeDerivs q_node(const FoldedCell& f, const BiasCondition& b, double q,
                  double qz) {
  BranchI n2 = channel_current(f.n2, q, b.vg2, qz);
  BranchI p2 = channel_current(f.p2, q, b.vddm, qz);
  BranchI n3 = channel_current(f.n3, q, b.vbl, b.vwl);
  NodeDerivs r;
  r.i = n2.i + p2.i + n3.i;
  r.di_dq = n2.di_dva + p2.di_dva + n3.di_dva;
  r.di_dqz = n2.di_dvg + p2.di_dvg;
  return r;
}

NodeDerivs qz_node(const FoldedCell& f, const BiasCondition& b, double q,
                   double qz) {
  BranchI n1 = channel_current(f.n1, qz, b.vg1, q);
  BranchI p1 = channel_current(f.p1, qz, b.vddm, q);
  NodeDerivs r;
  r.i = n1.i + p1.i;
  r.di_dqz = n1.di_dva + p1.di_dva;
  r.di_dq = n1.di_dvg + p1.di_dvg;
  if (f.has_a2) {
    BranchI a2 = channel_current(f.a2, qz, b.vblz, b.vwl);
    r.i += a2.i;
    r.di_dqz += a2.di_dva;
  }
  return r;
}

// Root of a strictly increasing scalar function on [lo, hi]: safeguarded
// Newton that always keeps a sign bracket, falling back to midpoint when
// a step leaves it. hint inside the bracket warm-starts sweeps.
struct FEval {
  double value = 0.0;
  double slope = 0.0;
};

double solve_increasing(const std::function<FEval(double)>& fn, double lo,
                        double hi, double hint) {
  FEval flo = fn(lo);
  if (flo.value >= 0.0) return lo;
  FEval fhi = fn(hi);
  if (fhi.value <= 0.0) return hi;

  double v = (hint > lo && hint < hi) ? hint : 0.5 * (lo + hi);
  for (int it = 0; it < 160; ++it) {
    FEval fv = fn(v);
    if (fv.value == 0.0) return v;
    if (fv.value > 0.0) {
      hi = v;
    } else {
      lo = v;
    }
    if (hi - lo < kVoltTol) break;
    double vn = 0.5 * (lo + hi);
    if (fv.slope > 0.0) {
      double cand = v - fv.value / fv.slope;
      if (cand > lo && cand < hi) vn = cand;
    }
    v = vn;
  }
  return 0.5 * (lo + hi);
}

double qz_bracket_lo(const FoldedCell& f, const BiasCondition& b) {
  double lo = std::min(b.vg1, b.vddm);
  if (f.has_a2) lo = std::min(lo, b.vblz);
  return lo - 1e-6;
}

double qz_bracket_hi(const FoldedCell& f, const BiasCondition& b) {
  double hi = std::max(b.vg1, b.vddm);
  if (f.has_a2) hi = std::max(hi, b.vblz);
  return hi + 1e-6;
}

double q_bracket_lo(const BiasCondition& b) {
  return std::min({b.vg2, b.vddm, b.vbl}) - 1e-6;
}

double q_bracket_hi(const BiasCondition& b) {
  return std::max({b.vg2, b.vddm, b.vbl}) + 1e-6;
}

double solve_qz_for_q(const FoldedCell& f, const BiasCondition& b, double q,
                      double hint) {
  return solve_increasing(
      [&](double qz) {
        NodeDerivs nd = qz_node(f, b, q, qz);
        return FEval{nd.i, nd.di_dqz};
      },
      qz_bracket_lo(f, b), qz_bracket_hi(f, b), hint);
}

double solve_q_for_qz(const FoldedCell& f, const BiasCondition& b, double qz,
                      double hint) {
  return solve_increasing(
      [&](double q) {
        NodeDerivs nd = q_node(f, b, q, qz);
        return FEval{nd.i, nd.di_dq};
      },
      q_bracket_lo(b), q_bracket_hi(b), hint);
}

double max_abs_residual(const FoldedCell& f, const BiasCondition& b,
                        const NodeVoltages& v) {
  return std::max(std::abs(q_node(f, b, v.q, v.qz).i),
                  std::abs(qz_node(f, b, v.q, v.qz).i));
}

}  // namespace

CellTopology CellTopology::five_t_sdg(VtFlavor inverter, VtFlavor access) {
  CellTopology c;
  c.kind = CellKind::FiveTSDG;
  c.n1 = DeviceParams::nmos(inverter);
  c.p1 = DeviceParams::pmos(inverter);
  c.n2 = DeviceParams::nmos(inverter);
  c.p2 = DeviceParams::pmos(inverter);
  c.n3 = DeviceParams::nmos(access);
  c.a2 = c.n3;
  c.cell_ratio_beta = 1.0;
  return c;
}

CellTopology CellTopology::six_t(double beta, VtFlavor inverter,
                                 VtFlavor access) {
  CellTopology c;
  c.kind = CellKind::SixT;
  c.n1 = DeviceParams::nmos(inverter);
  c.p1 = DeviceParams::pmos(inverter);
  c.n2 = DeviceParams::nmos(inverter);
  c.p2 = DeviceParams::pmos(inverter);
  c.n3 = DeviceParams::nmos(access);
  c.a2 = c.n3;
  c.cell_ratio_beta = beta;
  c.n1.width_um *= beta;
  c.n2.width_um *= beta;
  return c;
}

BiasCondition standby_bias(CellKind k, double vddm, double vssm) {
  BiasCondition b;
  b.vddm = vddm;
  b.vssm = vssm;
  b.vg1 = vssm;
  b.vg2 = vssm;
  b.vwl = 0.0;
  if (k == CellKind::FiveTSDG) {
    // Idle bitlines sit on the raised-ground rail, so a stored 0 sees no
    // drop across its access device at all.
    b.vbl = vssm;
    b.vblz = vddm;
  } else {
    b.vbl = vddm;
    b.vblz = vddm;
  }
  return b;
}

BiasCondition read_bias(CellKind k, double vddm, double vssm) {
  BiasCondition b = standby_bias(k, vddm, vssm);
  b.vwl = vddm;
  if (k == CellKind::FiveTSDG) {
    // Active words get their inverter grounds pulled to the hard rail for
    // read stability while the bitline stays at its raised precharge.
    b.vg1 = 0.0;
    b.vg2 = 0.0;
  }
  return b;
}

FoldedCell fold_cell(const CellTopology& c, const Corner& k,
                     double temperature_c) {
  FoldedCell f;
  f.kind = c.kind;
  f.n1 = fold(c.n1, k, temperature_c);
  f.p1 = fold(c.p1, k, temperature_c);
  f.n2 = fold(c.n2, k, temperature_c);
  f.p2 = fold(c.p2, k, temperature_c);
  f.n3 = fold(c.n3, k, temperature_c);
  f.has_a2 = (c.kind == CellKind::SixT);
  if (f.has_a2) f.a2 = fold(c.a2, k, temperature_c);
  return f;
}

FoldedCell fold_cell(const CellTopology& c, const Corner& k) {
  return fold_cell(c, k, k.temperature_c);
}

double node_current_q(const FoldedCell& f, const BiasCondition& b, double q,
                      double qz) {
  return q_node(f, b, q, qz).i;
}

double node_current_qz(const FoldedCell& f, const BiasCondition& b, double q,
                       double qz) {
  return qz_node(f, b, q, qz).i;
}

double vtc1(const FoldedCell& f, const BiasCondition& b, double q) {
  return solve_qz_for_q(f, b, q, -10.0);
}

double vtc2(const FoldedCell& f, const BiasCondition& b, double qz) {
  return solve_q_for_qz(f, b, qz, -10.0);
}

DcResult dc_solve(const FoldedCell& f, const BiasCondition& b,
                  NodeVoltages init) {
  DcResult res;
  res.v = init;
  res.residual_a = max_abs_residual(f, b, init);
  if (res.residual_a < kResidualTolA) {
    res.converged = true;
    return res;
  }

  double qlo = q_bracket_lo(b);
  double qhi = q_bracket_hi(b);
  double q = std::clamp(init.q, qlo, qhi);
  double qz = std::clamp(init.qz, qz_bracket_lo(f, b), qz_bracket_hi(f, b));

  // Alternating relaxation q -> vtc2(vtc1(q)). The composed map is
  // monotone increasing in q, so the orbit walks one-sided toward the
  // equilibrium whose basin holds the start point and can never step
  // across it. Extrapolated jumps are what could hop a basin when a write
  // bias squeezes two equilibria within millivolts of each other, so the
  // loop takes none: plain steps only, until the projected geometric tail
  // of the orbit is negligible and the Newton polish below can take over.
  auto g_of = [&](double qq, double& qz_out) {
    qz_out = solve_qz_for_q(f, b, qq, qz_out);
    double qn = solve_q_for_qz(f, b, qz_out, qq);
    return qn - qq;
  };

  double prev_dq = 0.0;
  int iters = 0;
  for (; iters < 20000; ++iters) {
    double qz_cur = qz;
    double g = g_of(q, qz_cur);
    qz = qz_cur;
    double qn = std::clamp(q + g, qlo, qhi);
    double dq = qn - q;
    q = qn;
    double adq = std::abs(dq);
    if (adq < 1e-12) break;
    if (iters > 0 && adq < 1e-9) {
      // Near an equilibrium the step sizes decay geometrically; once the
      // projected remainder of the walk is well under the polish radius
      // there is nothing left for more relaxation steps to decide.
      double r = adq / std::abs(prev_dq);
      double tail = (r < 1.0) ? adq * r / (1.0 - r)
                              : std::numeric_limits<double>::infinity();
      if (tail < 1e-7) break;
    }
    prev_dq = dq;
  }

  // Full two-node Newton polish for machine-level residuals.
  qz = solve_qz_for_q(f, b, q, qz);
  for (int it = 0; it < 40; ++it) {
    NodeDerivs rq = q_node(f, b, q, qz);
    NodeDerivs rz = qz_node(f, b, q, qz);
    double rmax = std::max(std::abs(rq.i), std::abs(rz.i));
    if (rmax < kResidualTolA) break;
    double det = rq.di_dq * rz.di_dqz - rq.di_dqz * rz.di_dq;
    if (det == 0.0) break;
    double dq_step = (-rq.i * rz.di_dqz + rz.i * rq.di_dqz) / det;
    double dz_step = (-rz.i * rq.di_dq + rq.i * rz.di_dq) / det;
    dq_step = std::clamp(dq_step, -kStepClampV, kStepClampV);
    dz_step = std::clamp(dz_step, -kStepClampV, kStepClampV);
    q += dq_step;
    qz += dz_step;
    if (std::abs(dq_step) < 1e-16 && std::abs(dz_step) < 1e-16) break;
  }

  res.v = {q, qz};
  res.iterations = iters;
  res.residual_a = max_abs_residual(f, b, res.v);
  res.converged = res.residual_a < kResidualTolA;
  return res;
}

DcResult dc_solve(const CellTopology& c, const Corner& k,
                  const BiasCondition& b, NodeVoltages init) {
  return dc_solve(fold_cell(c, k), b, init);
}

NodeVoltages stored_state(const FoldedCell& f, const BiasCondition& b,
                          bool bit) {
  double lo = std::min(b.vg1, b.vg2);
  NodeVoltages init = bit ? NodeVoltages{b.vddm, lo} : NodeVoltages{lo, b.vddm};
  return dc_solve(f, b, init).v;
}

double trip_voltage(const FoldedCell& f, const BiasCondition& b) {
  double hint = -10.0;
  double prev = -10.0;
  return solve_increasing(
      [&](double x) {
        double y = solve_qz_for_q(f, b, x, prev);
        prev = y;
        NodeDerivs dz = qz_node(f, b, x, y);
        double f1p = (dz.di_dqz > 0.0) ? -dz.di_dq / dz.di_dqz : 0.0;
        return FEval{x - y, 1.0 - f1p};
      },
      0.0, b.vddm, hint);
}

double trip_voltage(const CellTopology& c, const Corner& k,
                    const BiasCondition& b) {
  return trip_voltage(fold_cell(c, k), b);
}

namespace {

// Adaptive transfer-curve sweep: uniform seed, then midpoint subdivision
// wherever the output still jumps more than refine_dv. Keeps the knot
// count proportional to curve arc length instead of gain.
constexpr int kSweepSeedPoints = 1025;
constexpr double kSweepRefineDv = 0.002;
constexpr int kSweepMaxDepth = 8;

template <typename SolveFn>
Curve sweep_curve(double lo, double hi, SolveFn&& solve) {
  Curve c;
  c.x.reserve(4096);
  c.y.reserve(4096);

  std::function<void(double, double, double, double, int)> subdivide =
      [&](double x0, double y0, double x1, double y1, int depth) {
        if (depth <= 0 || std::abs(y1 - y0) <= kSweepRefineDv ||
            (x1 - x0) <= 1e-7) {
          c.x.push_back(x1);
          c.y.push_back(y1);
          return;
        }
        double xm = 0.5 * (x0 + x1);
        double ym = solve(xm, 0.5 * (y0 + y1));
        subdivide(x0, y0, xm, ym, depth - 1);
        subdivide(xm, ym, x1, y1, depth - 1);
      };

  double step = (hi - lo) / (kSweepSeedPoints - 1);
  double xprev = lo;
  double yprev = solve(lo, -10.0);
  c.x.push_back(xprev);
  c.y.push_back(yprev);
  for (int i = 1; i < kSweepSeedPoints; ++i) {
    double x = lo + i * step;
    double y = solve(x, yprev);
    subdivide(xprev, yprev, x, y, kSweepMaxDepth);
    xprev = x;
    yprev = y;
  }
  return c;
}

double sweep_floor(const FoldedCell& f, const BiasCondition& b) {
  double lo = std::min(b.vg1, b.vg2);
  if (b.vwl > 0.05) {
    lo = std::min(lo, b.vbl);
    if (f.has_a2) lo = std::min(lo, b.vblz);
  }
  return std::max(0.0, std::min(lo, b.vddm));
}

// Piecewise-linear evaluation over ascending knots.
double interp(const std::vector<double>& xs, const std::vector<double>& ys,
              double x) {
  auto it = std::lower_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin()) return ys.front();
  if (it == xs.end()) return ys.back();
  size_t i = static_cast<size_t>(it - xs.begin());
  double x0 = xs[i - 1], x1 = xs[i];
  double y0 = ys[i - 1], y1 = ys[i];
  if (x1 == x0) return 0.5 * (y0 + y1);
  return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

struct DiagCurve {
  std::vector<double> t;  // (v1 - v2)/sqrt2, ascending
  std::vector<double> u;  // (v1 + v2)/sqrt2
};

DiagCurve to_diagonal(const Curve& c, bool reverse) {
  DiagCurve d;
  size_t n = c.x.size();
  d.t.resize(n);
  d.u.resize(n);
  for (size_t i = 0; i < n; ++i) {
    size_t j = reverse ? n - 1 - i : i;
    d.t[i] = (c.x[j] - c.y[j]) / kSqrt2;
    d.u[i] = (c.x[j] + c.y[j]) / kSqrt2;
  }
  return d;
}

struct LobeScan {
  double best_gap = -std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  double lo_t = 0.0;
  double hi_t = 0.0;
};

// Exact diagonal gap between the curves at coordinate t, from fresh
// solves rather than the swept knots. sign=+1 measures uA-uB, -1 the
// opposite lobe.
double exact_gap(const FoldedCell& f, const BiasCondition& b, double sweep_lo,
                 double sweep_hi, double t, double sign) {
  double c = kSqrt2 * t;

  // Curve A point: x - vtc1(x) = c, left side strictly increasing in x.
  double hint_a = -10.0;
  double xa = solve_increasing(
      [&](double x) {
        double y = solve_qz_for_q(f, b, x, hint_a);
        hint_a = y;
        NodeDerivs dz = qz_node(f, b, x, y);
        double f1p = (dz.di_dqz > 0.0) ? -dz.di_dq / dz.di_dqz : 0.0;
        return FEval{x - y - c, 1.0 - f1p};
      },
      sweep_lo, sweep_hi, -10.0);
  double ya = solve_qz_for_q(f, b, xa, -10.0);
  double ua = (xa + ya) / kSqrt2;

  // Curve B point: vtc2(y) - y = c. That expression is strictly
  // decreasing in y, so solve its negation.
  double hint_b = -10.0;
  double yb = solve_increasing(
      [&](double y) {
        double x = solve_q_for_qz(f, b, y, hint_b);
        hint_b = x;
        NodeDerivs dq = q_node(f, b, x, y);
        double f2p = (dq.di_dq > 0.0) ? -dq.di_dqz / dq.di_dq : 0.0;
        return FEval{-(x - y - c), 1.0 - f2p};
      },
      sweep_lo, sweep_hi, -10.0);
  double xb = solve_q_for_qz(f, b, yb, -10.0);
  double ub = (xb + yb) / kSqrt2;

  return sign * (ua - ub);
}

double golden_max(const std::function<double(double)>& fn, double lo,
                  double hi, int iters) {
  const double inv_phi = 0.6180339887498949;
  double a = lo, bnd = hi;
  double x1 = bnd - inv_phi * (bnd - a);
  double x2 = a + inv_phi * (bnd - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (bnd - a);
      f2 = fn(x2);
    } else {
      bnd = x2;
      x2 = x1;
      f2 = f1;
      x1 = bnd - inv_phi * (bnd - a);
      f1 = fn(x1);
    }
  }
  return std::max(f1, f2);
}

}  // namespace

void butterfly(const FoldedCell& f, const BiasCondition& b, Curve& curve_a,
               Curve& curve_b) {
  double lo = sweep_floor(f, b);
  double hi = b.vddm;
  curve_a = sweep_curve(lo, hi, [&](double x, double hint) {
    return solve_qz_for_q(f, b, x, hint);
  });
  Curve bx = sweep_curve(lo, hi, [&](double y, double hint) {
    return solve_q_for_qz(f, b, y, hint);
  });
  // Stored as (v1, v2) points: curve B's sweep variable is the v2 axis.
  curve_b.x = bx.y;
  curve_b.y = bx.x;
}

MarginResult snm(const FoldedCell& f, const BiasCondition& b) {
  MarginResult m;
  butterfly(f, b, m.curve_a, m.curve_b);

  // Both curves are single-valued along the 45-degree diagonal, so the
  // largest inscribed square per eye reduces to the largest vertical gap
  // in rotated coordinates, divided back by sqrt2.
  DiagCurve da = to_diagonal(m.curve_a, false);
  DiagCurve db = to_diagonal(m.curve_b, true);

  double tlo = std::max(da.t.front(), db.t.front());
  double thi = std::min(da.t.back(), db.t.back());
  if (!(thi > tlo)) {
    m.monostable = true;
    return m;
  }

  LobeScan pos, neg;
  auto scan = [&](const std::vector<double>& knots) {
    for (double t : knots) {
      if (t < tlo || t > thi) continue;
      double gap = interp(da.t, da.u, t) - interp(db.t, db.u, t);
      if (gap > pos.best_gap) {
        pos.best_gap = gap;
        pos.best_t = t;
      }
      if (-gap > neg.best_gap) {
        neg.best_gap = -gap;
        neg.best_t = t;
      }
    }
  };
  scan(da.t);
  scan(db.t);

  auto polish = [&](LobeScan& lobe, double sign) {
    double span = 0.004;  // the knot pitch after refinement is ~2 mV of y
    double a = std::max(tlo, lobe.best_t - span);
    double c = std::min(thi, lobe.best_t + span);
    double refined = golden_max(
        [&](double t) {
          return exact_gap(f, b, sweep_floor(f, b), b.vddm, t, sign);
        },
        a, c, 36);
    lobe.best_gap = std::max(lobe.best_gap, refined);
  };

  if (pos.best_gap > 0.0) polish(pos, +1.0);
  if (neg.best_gap > 0.0) polish(neg, -1.0);

  m.lobe1_mv = pos.best_gap / kSqrt2 * 1e3;
  m.lobe2_mv = neg.best_gap / kSqrt2 * 1e3;
  // Sub-nanovolt eye openings are interpolation dust on a diagram whose
  // curves merely graze each other; call that collapsed rather than report
  // a margin no physical cell could bank on.
  constexpr double kLobeNoiseV = 1e-9;
  if (pos.best_gap <= kLobeNoiseV || neg.best_gap <= kLobeNoiseV) {
    m.monostable = true;
    m.value_mv = 0.0;
  } else {
    m.value_mv = std::min(m.lobe1_mv, m.lobe2_mv);
  }
  return m;
}

MarginResult snm(const CellTopology& c, const Corner& k,
                 const BiasCondition& b) {
  return snm(fold_cell(c, k), b);
}

MarginResult rnm(const CellTopology& c, const Corner& k, double vddm,
                 double vssm, double bl_bias) {
  BiasCondition b = read_bias(c.kind, vddm, vssm);
  b.vbl = bl_bias;
  if (c.kind == CellKind::SixT) b.vblz = bl_bias;
  return snm(fold_cell(c, k), b);
}

MarginResult w1_disturb_snm(const CellTopology& c, const Corner& k,
                            double vddm, double vssm, double vg1, double vg2) {
  // Wordline stays low for the half-selected row; only the shared ground
  // lines move, dragged by the write circuitry of the selected row.
  BiasCondition b = standby_bias(c.kind, vddm, vssm);
  b.vg1 = vg1;
  b.vg2 = vg2;
  return snm(fold_cell(c, k), b);
}

ReadLevels read_disturb_levels(const FoldedCell& f, const BiasCondition& b) {
  ReadLevels r;
  r.q_low_v = stored_state(f, b, false).q;
  r.q_high_v = stored_state(f, b, true).q;
  return r;
}

WriteResult write_margin(const FoldedCell& f, const BiasCondition& write_bias,
                         WriteKind kind) {
  WriteResult out;
  BiasCondition wb = write_bias;

  // Flip test: settle the stored state under the write bias and see which
  // side of the latch it ends on.
  auto flips = [&](double vbl) {
    wb.vbl = vbl;
    if (f.has_a2) wb.vblz = write_bias.vddm - vbl;
    double lo = std::min(wb.vg1, wb.vg2);
    NodeVoltages init = (kind == WriteKind::WriteZero)
                            ? NodeVoltages{wb.vddm, lo}
                            : NodeVoltages{lo, wb.vddm};
    NodeVoltages v = dc_solve(f, wb, init).v;
    return (kind == WriteKind::WriteZero) ? (v.q < v.qz) : (v.q > v.qz);
  };

  double vddm = write_bias.vddm;
  if (kind == WriteKind::WriteZero) {
    if (!flips(0.0)) return out;  // cannot write even rail-to-rail
    out.writable = true;
    if (flips(vddm)) {
      out.margin_v = vddm;
      return out;
    }
    double lo = 0.0, hi = vddm;  // flips at lo, holds at hi
    while (hi - lo > 1e-4) {
      double mid = 0.5 * (lo + hi);
      (flips(mid) ? lo : hi) = mid;
    }
    out.margin_v = 0.5 * (lo + hi);
  } else {
    if (!flips(vddm)) return out;
    out.writable = true;
    if (flips(0.0)) {
      out.margin_v = vddm;
      return out;
    }
    double lo = 0.0, hi = vddm;  // holds at lo, flips at hi
    while (hi - lo > 1e-4) {
      double mid = 0.5 * (lo + hi);
      (flips(mid) ? hi : lo) = mid;
    }
    out.margin_v = vddm - 0.5 * (lo + hi);
  }
  return out;
}

WriteResult write_margin(const CellTopology& c, const Corner& k,
                         const BiasCondition& write_bias, WriteKind kind) {
  return write_margin(fold_cell(c, k), write_bias, kind);
}

double equalizer_delivered_v(double vssm, double g_equalizer_s,
                             double g_pulldown_s) {
  double total = g_equalizer_s + g_pulldown_s;
  if (total <= 0.0) return 0.0;
  return vssm * g_equalizer_s / total;
}

BranchCurrents branch_currents(const FoldedCell& f, const BiasCondition& b,
                               NodeVoltages v) {
  BranchCurrents r;
  r.p1_vddm_to_qz = -channel_current(f.p1, v.qz, b.vddm, v.q).i;
  r.n1_qz_to_vg1 = channel_current(f.n1, v.qz, b.vg1, v.q).i;
  r.p2_vddm_to_q = -channel_current(f.p2, v.q, b.vddm, v.qz).i;
  r.n2_q_to_vg2 = channel_current(f.n2, v.q, b.vg2, v.qz).i;
  r.n3_q_to_vbl = channel_current(f.n3, v.q, b.vbl, b.vwl).i;
  if (f.has_a2) r.a2_qz_to_vblz = channel_current(f.a2, v.qz, b.vblz, b.vwl).i;
  return r;
}

}  // namespace sdg
