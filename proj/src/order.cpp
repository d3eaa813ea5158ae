#include "gark/order.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include "gark/construct.hpp"

namespace gark {

namespace {

int attained(const std::map<int, ConditionReport>& per_order) {
  int p = 0;
  for (const auto& [k, rep] : per_order) {
    if (k != p + 1 || !rep.verdict) break;
    p = k;
  }
  return p;
}

bool nonempty(std::initializer_list<int> sizes) {
  for (int n : sizes)
    if (n == 0) return false;
  return true;
}

}  // namespace

OrderReport gark_order_residuals(const GarkTableau& t, int max_order, double tol) {
  bool ic = is_internally_consistent(t, tol).consistent;
  return gark_order_residuals(t, max_order, tol, ic);
}

OrderReport gark_order_residuals(const GarkTableau& t, int max_order, double tol, bool use_intcons) {
  const int N = t.N;
  auto cc = coupling_abscissae(t);
  auto s = [&](int q) { return t.stages(q); };
  auto b = [&](int q) -> const Vector& { return t.weights(q); };
  auto A = [&](int q, int m) -> const Matrix& { return t.block(q, m); };
  auto c2 = [&](int q, int m) -> const Vector& { return cc.at({q, m}); };
  // Under internal consistency every block row shares one abscissa vector.
  auto c1 = [&](int q) -> const Vector& { return cc.at({q, 1}); };

  OrderReport out;
  out.internally_consistent = use_intcons;
  if (use_intcons) out.notes.push_back("internally consistent: simplified condition set");

  if (max_order >= 1) {
    ConditionReport& r = out.per_order[1];
    for (int sg = 1; sg <= N; ++sg)
      if (nonempty({s(sg)})) r.add("1", {sg}, b(sg).sum() - 1.0);
  }
  if (max_order >= 2) {
    ConditionReport& r = out.per_order[2];
    for (int sg = 1; sg <= N; ++sg) {
      if (use_intcons) {
        if (nonempty({s(sg)})) r.add("2", {sg}, b(sg).dot(c1(sg)) - 0.5);
        continue;
      }
      for (int nu = 1; nu <= N; ++nu)
        if (nonempty({s(sg), s(nu)})) r.add("2", {sg, nu}, b(sg).dot(c2(sg, nu)) - 0.5);
    }
  }
  if (max_order >= 3) {
    ConditionReport& r = out.per_order[3];
    if (use_intcons) {
      for (int sg = 1; sg <= N; ++sg)
        if (nonempty({s(sg)})) r.add("3a", {sg}, b(sg).dot(c1(sg).cwiseProduct(c1(sg))) - 1.0 / 3.0);
      for (int sg = 1; sg <= N; ++sg)
        for (int nu = 1; nu <= N; ++nu)
          if (nonempty({s(sg), s(nu)})) r.add("3b", {sg, nu}, b(sg).dot(A(sg, nu) * c1(nu)) - 1.0 / 6.0);
    } else {
      for (int sg = 1; sg <= N; ++sg)
        for (int nu = 1; nu <= N; ++nu)
          for (int mu = 1; mu <= N; ++mu)
            if (nonempty({s(sg), s(nu), s(mu)}))
              r.add("3a", {sg, nu, mu}, b(sg).dot(c2(sg, nu).cwiseProduct(c2(sg, mu))) - 1.0 / 3.0);
      for (int sg = 1; sg <= N; ++sg)
        for (int nu = 1; nu <= N; ++nu)
          for (int mu = 1; mu <= N; ++mu)
            if (nonempty({s(sg), s(nu), s(mu)}))
              r.add("3b", {sg, nu, mu}, b(sg).dot(A(sg, nu) * c2(nu, mu)) - 1.0 / 6.0);
    }
  }
  if (max_order >= 4) {
    ConditionReport& r = out.per_order[4];
    if (use_intcons) {
      for (int sg = 1; sg <= N; ++sg)
        if (nonempty({s(sg)}))
          r.add("4a", {sg}, b(sg).dot(c1(sg).cwiseProduct(c1(sg)).cwiseProduct(c1(sg))) - 0.25);
      for (int sg = 1; sg <= N; ++sg)
        for (int nu = 1; nu <= N; ++nu)
          if (nonempty({s(sg), s(nu)}))
            r.add("4b", {sg, nu}, b(sg).cwiseProduct(c1(sg)).dot(A(sg, nu) * c1(nu)) - 1.0 / 8.0);
      for (int sg = 1; sg <= N; ++sg)
        for (int nu = 1; nu <= N; ++nu)
          if (nonempty({s(sg), s(nu)}))
            r.add("4c", {sg, nu}, b(sg).dot(A(sg, nu) * c1(nu).cwiseProduct(c1(nu))) - 1.0 / 12.0);
      for (int sg = 1; sg <= N; ++sg)
        for (int nu = 1; nu <= N; ++nu)
          for (int la = 1; la <= N; ++la)
            if (nonempty({s(sg), s(nu), s(la)}))
              r.add("4d", {sg, nu, la}, b(sg).dot(A(sg, nu) * (A(nu, la) * c1(la))) - 1.0 / 24.0);
    } else {
      auto each = [&](auto&& fn) {
        for (int sg = 1; sg <= N; ++sg)
          for (int nu = 1; nu <= N; ++nu)
            for (int la = 1; la <= N; ++la)
              for (int mu = 1; mu <= N; ++mu)
                if (nonempty({s(sg), s(nu), s(la), s(mu)})) fn(sg, nu, la, mu);
      };
      each([&](int sg, int nu, int la, int mu) {
        r.add("4a", {sg, nu, la, mu},
              b(sg).dot(c2(sg, nu).cwiseProduct(c2(sg, la)).cwiseProduct(c2(sg, mu))) - 0.25);
      });
      each([&](int sg, int nu, int la, int mu) {
        r.add("4b", {sg, nu, la, mu}, b(sg).cwiseProduct(c2(sg, mu)).dot(A(sg, nu) * c2(nu, la)) - 1.0 / 8.0);
      });
      each([&](int sg, int nu, int la, int mu) {
        r.add("4c", {sg, nu, la, mu},
              b(sg).dot(A(sg, nu) * c2(nu, la).cwiseProduct(c2(nu, mu))) - 1.0 / 12.0);
      });
      each([&](int sg, int nu, int la, int mu) {
        r.add("4d", {sg, nu, la, mu}, b(sg).dot(A(sg, nu) * (A(nu, la) * c2(la, mu))) - 1.0 / 24.0);
      });
    }
  }
  for (auto& [k, rep] : out.per_order) rep.finalize(tol);
  out.attained_order = attained(out.per_order);
  return out;
}

OrderReport partitioned_order_residuals(const PartitionedGarkTableau& t, int max_order, double tol) {
  std::vector<int> all;
  for (int q = 1; q <= t.N; ++q) all.push_back(q);
  return partitioned_order_residuals(t, max_order, tol, all);
}

OrderReport partitioned_order_residuals(const PartitionedGarkTableau& t, int max_order, double tol,
                                        const std::vector<int>& parts) {
  auto s = [&](int q) { return t.stages(q); };
  auto sh = [&](int q) { return t.stages_hat(q); };
  auto b = [&](int q) -> const Vector& { return t.weights(q); };
  auto bh = [&](int q) -> const Vector& { return t.weights_hat(q); };
  auto A = [&](int q, int m) -> const Matrix& { return t.block(q, m); };
  auto Ah = [&](int q, int m) -> const Matrix& { return t.block_hat(q, m); };
  std::map<BlockKey, Vector> cmap, chmap;
  for (int q = 1; q <= t.N; ++q)
    for (int m = 1; m <= t.N; ++m) {
      cmap[{q, m}] = A(q, m).rowwise().sum();
      chmap[{q, m}] = Ah(q, m).rowwise().sum();
    }
  auto c = [&](int q, int m) -> const Vector& { return cmap.at({q, m}); };
  auto ch = [&](int q, int m) -> const Vector& { return chmap.at({q, m}); };

  OrderReport out;
  auto each1 = [&](auto&& fn) {
    for (int a : parts) fn(a);
  };
  auto each2 = [&](auto&& fn) {
    for (int a : parts)
      for (int b2 : parts) fn(a, b2);
  };
  auto each3 = [&](auto&& fn) {
    for (int a : parts)
      for (int b2 : parts)
        for (int c3 : parts) fn(a, b2, c3);
  };
  auto each4 = [&](auto&& fn) {
    for (int a : parts)
      for (int b2 : parts)
        for (int c3 : parts)
          for (int d : parts) fn(a, b2, c3, d);
  };

  if (max_order >= 1) {
    ConditionReport& r = out.per_order[1];
    each1([&](int sg) {
      if (nonempty({sh(sg)})) r.add("1a", {sg}, bh(sg).sum() - 1.0);
    });
    each1([&](int sg) {
      if (nonempty({s(sg)})) r.add("1b", {sg}, b(sg).sum() - 1.0);
    });
  }
  if (max_order >= 2) {
    ConditionReport& r = out.per_order[2];
    each2([&](int sg, int nu) {
      if (nonempty({sh(sg), s(nu)})) r.add("2a", {sg, nu}, bh(sg).dot(c(sg, nu)) - 0.5);
    });
    each2([&](int sg, int nu) {
      if (nonempty({s(sg), sh(nu)})) r.add("2b", {sg, nu}, b(sg).dot(ch(sg, nu)) - 0.5);
    });
  }
  if (max_order >= 3) {
    ConditionReport& r = out.per_order[3];
    each3([&](int sg, int nu, int mu) {
      if (nonempty({sh(sg), s(nu), s(mu)}))
        r.add("3aa", {sg, nu, mu}, bh(sg).dot(c(sg, nu).cwiseProduct(c(sg, mu))) - 1.0 / 3.0);
    });
    each3([&](int sg, int nu, int mu) {
      if (nonempty({s(sg), sh(nu), sh(mu)}))
        r.add("3ab", {sg, nu, mu}, b(sg).dot(ch(sg, nu).cwiseProduct(ch(sg, mu))) - 1.0 / 3.0);
    });
    each3([&](int sg, int nu, int mu) {
      if (nonempty({sh(sg), s(nu), sh(mu)}))
        r.add("3ba", {sg, nu, mu}, bh(sg).dot(A(sg, nu) * ch(nu, mu)) - 1.0 / 6.0);
    });
    each3([&](int sg, int nu, int mu) {
      if (nonempty({s(sg), sh(nu), s(mu)}))
        r.add("3bb", {sg, nu, mu}, b(sg).dot(Ah(sg, nu) * c(nu, mu)) - 1.0 / 6.0);
    });
  }
  if (max_order >= 4) {
    ConditionReport& r = out.per_order[4];
    each4([&](int sg, int nu, int la, int mu) {
      if (nonempty({sh(sg), s(nu), s(la), s(mu)}))
        r.add("4aa", {sg, nu, la, mu},
              bh(sg).dot(c(sg, nu).cwiseProduct(c(sg, la)).cwiseProduct(c(sg, mu))) - 0.25);
    });
    each4([&](int sg, int nu, int la, int mu) {
      if (nonempty({s(sg), sh(nu), sh(la), sh(mu)}))
        r.add("4ab", {sg, nu, la, mu},
              b(sg).dot(ch(sg, nu).cwiseProduct(ch(sg, la)).cwiseProduct(ch(sg, mu))) - 0.25);
    });
    each4([&](int sg, int nu, int la, int mu) {
      if (nonempty({sh(sg), s(mu), s(nu), sh(la)}))
        r.add("4ba", {sg, nu, la, mu}, bh(sg).cwiseProduct(c(sg, mu)).dot(A(sg, nu) * ch(nu, la)) - 1.0 / 8.0);
    });
    each4([&](int sg, int nu, int la, int mu) {
      if (nonempty({s(sg), sh(mu), sh(nu), s(la)}))
        r.add("4bb", {sg, nu, la, mu}, b(sg).cwiseProduct(ch(sg, mu)).dot(Ah(sg, nu) * c(nu, la)) - 1.0 / 8.0);
    });
    each4([&](int sg, int nu, int la, int mu) {
      if (nonempty({sh(sg), s(nu), sh(la), sh(mu)}))
        r.add("4ca", {sg, nu, la, mu}, bh(sg).dot(A(sg, nu) * ch(nu, la).cwiseProduct(ch(nu, mu))) - 1.0 / 12.0);
    });
    each4([&](int sg, int nu, int la, int mu) {
      if (nonempty({s(sg), sh(nu), s(la), s(mu)}))
        r.add("4cb", {sg, nu, la, mu}, b(sg).dot(Ah(sg, nu) * c(nu, la).cwiseProduct(c(nu, mu))) - 1.0 / 12.0);
    });
    each4([&](int sg, int nu, int la, int mu) {
      if (nonempty({sh(sg), s(nu), sh(la), s(mu)}))
        r.add("4da", {sg, nu, la, mu}, bh(sg).dot(A(sg, nu) * (Ah(nu, la) * c(la, mu))) - 1.0 / 24.0);
    });
    each4([&](int sg, int nu, int la, int mu) {
      if (nonempty({s(sg), sh(nu), s(la), sh(mu)}))
        r.add("4db", {sg, nu, la, mu}, b(sg).dot(Ah(sg, nu) * (A(nu, la) * ch(la, mu))) - 1.0 / 24.0);
    });
  }
  for (auto& [k, rep] : out.per_order) rep.finalize(tol);
  out.attained_order = attained(out.per_order);
  return out;
}

MixedOrder mixed_order_report(const PartitionedGarkTableau& t, int fast_partition, double tol) {
  ConditionReport sym = symmetry_residual(t, tol);
  if (!sym.verdict)
    throw NotSymmetric("tableau is not symmetric (residual " + std::to_string(sym.max_abs_residual) + ")");
  if (fast_partition < 1 || fast_partition > t.N)
    throw DimensionMismatch("fast partition " + std::to_string(fast_partition) + " out of range");
  MixedOrder out;
  out.fast_order_raw = partitioned_order_residuals(t, 4, tol, {fast_partition}).attained_order;
  out.overall_order_raw = partitioned_order_residuals(t, 4, tol).attained_order;
  // Symmetric one-step methods have even order.
  auto lift = [&](int p, const char* which) {
    if (p % 2 == 1 && p < 4) {
      out.notes.push_back(std::string(which) + ": order " + std::to_string(p) +
                          " lifted to " + std::to_string(p + 1) + " by symmetry");
      return p + 1;
    }
    return p;
  };
  out.fast_order = lift(out.fast_order_raw, "fast");
  out.overall_order = lift(out.overall_order_raw, "overall");
  return out;
}

Order4Equivalence verify_order4_iff(const PartitionedGarkTableau& t, double tol) {
  for (int m = 1; m <= t.N; ++m) {
    if (t.s[m - 1] != t.s_hat[m - 1]) throw NotConjugate("stage counts of A and A_hat differ");
    if (t.s[m - 1] > 0 && (t.weights(m) - t.weights_hat(m)).cwiseAbs().maxCoeff() > tol)
      throw NotConjugate("b and b_hat differ in partition " + std::to_string(m));
  }
  BlockMap conj = symplectic_conjugate(t.A, t.b);
  for (const auto& [k, M] : conj) {
    const Matrix& given = t.block_hat(k.first, k.second);
    if (M.size() > 0 && (M - given).cwiseAbs().maxCoeff() > std::max(tol, 1e-12) * (1.0 + M.cwiseAbs().maxCoeff()))
      throw NotConjugate("A_hat block (" + std::to_string(k.first) + "," + std::to_string(k.second) +
                         ") is not the symplectic conjugate of A");
  }
  OrderReport rep = partitioned_order_residuals(t, 4, tol);
  Order4Equivalence out;
  double worst_a = 0.0, worst_b = 0.0;
  for (const auto& e : rep.per_order.at(4).entries) {
    if (e.id == "4ba") worst_a = std::max(worst_a, std::abs(e.residual));
    if (e.id == "4bb") worst_b = std::max(worst_b, std::abs(e.residual));
  }
  out.cond_4ba = worst_a <= tol;
  out.cond_4bb = worst_b <= tol;
  out.agree = out.cond_4ba == out.cond_4bb;
  out.order4 = rep.attained_order >= 4;
  return out;
}

}  // namespace gark
