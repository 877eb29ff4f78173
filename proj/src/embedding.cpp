#include "coarsekit/embedding.hpp"

#include "coarsekit/covers.hpp"

namespace coarsekit {

const std::vector<double>* FeatureMap::find(PointId p) const {
  auto it = std::lower_bound(points.begin(), points.end(), p);
  if (it == points.end() || *it != p) return nullptr;
  return &vectors[std::size_t(it - points.begin())];
}

double inner(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& v) { return std::sqrt(inner(v, v)); }

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    const double d = (i < a.size() ? a[i] : 0.0) - (i < b.size() ? b[i] : 0.0);
    s += d * d;
  }
  return std::sqrt(s);
}

FeatureMap rotation_map(const FiniteMetricSpace& space, const PointSet& points, PointId base, double theta) {
  FeatureMap m;
  m.points = points;
  m.dim = 2;
  for (PointId p : points) {
    const double t = space.dist(p, base);
    m.vectors.push_back({std::cos(theta * t), std::sin(theta * t)});
  }
  return m;
}

std::vector<std::pair<double, double>> decay_profile(const FiniteMetricSpace& space, const FeatureMap& map,
                                                     const std::vector<double>& S_grid) {
  std::vector<std::pair<double, double>> out;
  for (double S : S_grid) {
    double sup = 0.0;
    for (std::size_t a = 0; a < map.points.size(); ++a) {
      for (std::size_t b = a + 1; b < map.points.size(); ++b) {
        if (tol::geq(space.dist(map.points[a], map.points[b]), S)) {
          sup = std::max(sup, std::abs(inner(map.vectors[a], map.vectors[b])));
        }
      }
    }
    out.emplace_back(S, sup);
  }
  return out;
}

DgReport check_dg_criterion(const FiniteMetricSpace& space, const FeatureMap& map, double R, double epsilon,
                            const std::vector<double>& S_grid) {
  DgReport rep;
  for (std::size_t k = 0; k < map.points.size(); ++k) {
    const double err = std::abs(norm(map.vectors[k]) - 1.0);
    if (err > rep.worst_norm_error) {
      rep.worst_norm_error = err;
      rep.worst_norm_point = map.points[k];
    }
  }
  rep.unit_norm = rep.worst_norm_error <= tol::kTau;
  for (std::size_t a = 0; a < map.points.size(); ++a) {
    for (std::size_t b = a + 1; b < map.points.size(); ++b) {
      if (!tol::leq(space.dist(map.points[a], map.points[b]), R)) continue;
      const double v = distance(map.vectors[a], map.vectors[b]);
      if (v > rep.max_variation) {
        rep.max_variation = v;
        rep.worst_pair = std::pair{map.points[a], map.points[b]};
      }
    }
  }
  rep.variation_ok = tol::leq(rep.max_variation, epsilon);
  rep.profile = decay_profile(space, map, S_grid);
  return rep;
}

std::vector<std::vector<double>> distance_weights(const Subspace& domain, const std::vector<PointSet>& parts) {
  std::vector<std::vector<double>> w(parts.size(), std::vector<double>(domain.points.size(), 0.0));
  for (std::size_t k = 0; k < domain.points.size(); ++k) {
    const PointId x = domain.points[k];
    double total = 0.0;
    for (std::size_t j = 0; j < parts.size(); ++j) {
      if (contains(parts[j], x)) {
        w[j][k] = distance_to_complement(domain, parts[j], x);
        total += w[j][k];
      }
    }
    for (std::size_t j = 0; j < parts.size(); ++j) {
      if (std::isinf(total)) {
        w[j][k] = std::isinf(w[j][k]) ? 1.0 : 0.0;
      } else if (total > 0.0) {
        w[j][k] /= total;
      }
    }
  }
  return w;
}

GlueResult glue_embeddings(const GlueInput& in) {
  const auto& pts = in.domain.points;
  const std::size_t J = in.parts.size();
  if (in.weights.size() != J || in.xis.size() != J) {
    throw Error(ErrorCode::InvalidInput, "parts, weights and feature maps must align",
                {{"parts", J}, {"weights", in.weights.size()}, {"maps", in.xis.size()}});
  }
  for (const auto& w : in.weights) {
    if (w.size() != pts.size()) throw Error(ErrorCode::InvalidInput, "weight vector length differs from the domain");
  }
  auto r_close = [&](std::size_t a, std::size_t b) { return tol::leq(in.domain.dist(pts[a], pts[b]), in.R); };

  GlueResult out;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    double sum = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      const double w = in.weights[j][k];
      if (w < -tol::kTau) {
        throw Error(ErrorCode::WeightAxiomViolated, "negative weight", {{"axiom", "a"}, {"part", j}, {"point", pts[k]}});
      }
      if (!contains(in.parts[j], pts[k]) && std::abs(w) > tol::kTau) {
        throw Error(ErrorCode::WeightAxiomViolated, "weight nonzero outside its part",
                    {{"axiom", "b"}, {"part", j}, {"point", pts[k]}, {"weight", w}});
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > tol::kTau) {
      throw Error(ErrorCode::WeightAxiomViolated, "weights do not sum to 1",
                  {{"axiom", "a"}, {"point", pts[k]}, {"sum", sum}});
    }
  }
  const double weight_bound = in.epsilon * in.epsilon / 4.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      if (!r_close(a, b)) continue;
      double var = 0.0;
      for (std::size_t j = 0; j < J; ++j) var += std::abs(in.weights[j][a] - in.weights[j][b]);
      out.max_weight_variation = std::max(out.max_weight_variation, var);
      if (!tol::leq(var, weight_bound)) {
        throw Error(ErrorCode::WeightAxiomViolated, "weights vary by more than epsilon^2/4 on an R-close pair",
                    {{"axiom", "c"}, {"p", pts[a]}, {"q", pts[b]}, {"variation", var}, {"bound", weight_bound}});
      }
    }
  }

  Cover parts_cover{in.domain, in.parts};
  out.enlarged = enlarge(parts_cover, in.R).elements;
  std::size_t dim = 0;
  for (std::size_t j = 0; j < J; ++j) {
    const auto& xi = in.xis[j];
    const auto& UR = out.enlarged[j];
    for (PointId x : UR) {
      const auto* v = xi.find(x);
      if (!v) throw Error(ErrorCode::PartConditionViolated, "feature map undefined on U^R", {{"part", j}, {"which", "domain"}, {"point", x}});
      if (std::abs(norm(*v) - 1.0) > tol::kTau) {
        throw Error(ErrorCode::PartConditionViolated, "feature vector is not a unit vector",
                    {{"part", j}, {"which", "i"}, {"point", x}, {"norm", norm(*v)}});
      }
    }
    for (std::size_t a = 0; a < UR.size(); ++a) {
      for (std::size_t b = a + 1; b < UR.size(); ++b) {
        if (!tol::leq(in.domain.dist(UR[a], UR[b]), in.R)) continue;
        const double v = distance(*xi.find(UR[a]), *xi.find(UR[b]));
        if (!tol::leq(v, in.epsilon / 2.0)) {
          throw Error(ErrorCode::PartConditionViolated, "feature map varies by more than epsilon/2 on U^R",
                      {{"part", j}, {"which", "ii"}, {"p", UR[a]}, {"q", UR[b]}, {"variation", v}});
        }
      }
    }
    out.offsets.push_back(dim);
    dim += xi.dim;
  }

  out.eta.points = pts;
  out.eta.dim = dim;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    std::vector<double> v(dim, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      if (!contains(out.enlarged[j], pts[k])) continue;
      const double s = std::sqrt(std::max(0.0, in.weights[j][k]));
      const auto& xv = *in.xis[j].find(pts[k]);
      for (std::size_t c = 0; c < xv.size(); ++c) v[out.offsets[j] + c] = s * xv[c];
    }
    out.max_norm_error = std::max(out.max_norm_error, std::abs(norm(v) - 1.0));
    out.eta.vectors.push_back(std::move(v));
  }
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      if (r_close(a, b)) out.max_variation = std::max(out.max_variation, distance(out.eta.vectors[a], out.eta.vectors[b]));
    }
  }
  out.norm_ok = out.max_norm_error <= tol::kTau;
  out.variation_ok = tol::leq(out.max_variation, in.epsilon);
  out.profile = decay_profile(*in.domain.space, out.eta, in.S_grid);
  return out;
}

}  // namespace coarsekit
