#pragma once

#include <string>
#include <vector>

#include "coeff.hpp"

namespace tkoszul {

enum class ChartKind { diagonal, offdiagonal };

inline std::string to_string(ChartKind k) { return k == ChartKind::diagonal ? "diagonal" : "offdiagonal"; }

struct Chart {
  std::string id;
  ChartKind kind = ChartKind::diagonal;
  int n = 1;
  CoeffRing ring{1};

  static Chart diagonal(std::string id, int n) { return Chart{std::move(id), ChartKind::diagonal, n, CoeffRing(n)}; }
  // Off-diagonal chart localized at z1 - zeta1 unless other forms are given.
  static Chart offdiagonal(std::string id, int n, std::vector<Polynomial> forms = {}) {
    if (forms.empty()) forms.push_back(Polynomial::variable(z_var(0)) - Polynomial::variable(zeta_var(0)));
    return Chart{std::move(id), ChartKind::offdiagonal, n, CoeffRing(n, std::move(forms))};
  }
  bool is_diagonal() const { return kind == ChartKind::diagonal; }
};

// Components s_1..s_n of the Koszul section in the chart's own coordinates.
using Section = std::vector<CoeffFunction>;

inline Section section(const Chart& c) {
  Section s;
  for (int j = 0; j < c.n; ++j) {
    if (c.is_diagonal())
      s.emplace_back(c.n, Polynomial::variable(z_var(j)) - Polynomial::variable(zeta_var(j)));
    else
      s.push_back(CoeffFunction::constant(c.n, j == 0 ? 1 : 0));
  }
  return s;
}

}  // namespace tkoszul
