#include "beamnf/forcing.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace beamnf {

double block_weight(int j, double eps, double rho) {
  return std::pow(eps, std::pow(1.0 + rho, j));
}

double eval_psi(const ForcingHierarchy& h, int l,
                const std::vector<double>& theta) {
  cplx acc = 0.0;
  for (const auto& blk : h.blocks) {
    if (static_cast<int>(theta.size()) < blk.n_angles)
      throw std::invalid_argument("eval_psi: not enough angle components");
    std::vector<cplx> th(theta.begin(), theta.begin() + blk.n_angles);
    acc += block_weight(blk.index, h.eps, h.rho) *
           eval(blk.psi[l], th, {}, {});
  }
  if (std::abs(acc.imag()) > 1e-12 * (1.0 + std::abs(acc)))
    throw std::invalid_argument("eval_psi: forcing is not real");
  return acc.real();
}

H2Report validate_H2(const ForcingHierarchy& h) {
  H2Report rep;
  rep.pass = true;
  for (const auto& blk : h.blocks) {
    for (int l = 0; l < 4; ++l) {
      H2Report::Row row;
      row.block = blk.index;
      row.l = l;
      row.conj_symmetric = check_real(blk.psi[l]);
      for (const auto& [key, c] : blk.psi[l].terms())
        row.sup_majorant += std::abs(c);
      for (int i = blk.new_angle_begin; i < blk.n_angles; ++i) {
        double d = 0.0;
        for (const auto& [key, c] : blk.psi[l].terms())
          d += std::abs(key.k[i]) * std::abs(c);
        row.max_new_angle_derivative = std::max(row.max_new_angle_derivative, d);
      }
      row.ok = row.conj_symmetric && row.sup_majorant <= h.c0 + 1e-15 &&
               row.max_new_angle_derivative <= h.c0 + 1e-15;
      if (l == 0 && !blk.psi[0].empty()) rep.psi0_nonzero = true;
      rep.pass = rep.pass && row.ok;
      rep.rows.push_back(std::move(row));
    }
  }
  rep.pass = rep.pass && rep.psi0_nonzero;
  return rep;
}

std::string H2Report::summary() const {
  std::ostringstream os;
  os << (pass ? "pass" : "FAIL") << "; psi0 "
     << (psi0_nonzero ? "nonzero" : "IDENTICALLY ZERO");
  for (const auto& r : rows)
    if (!r.ok)
      os << "; block " << r.block << " level " << r.l << " sup "
         << r.sup_majorant << " dtheta " << r.max_new_angle_derivative
         << (r.conj_symmetric ? "" : " asymmetric");
  return os.str();
}

}  // namespace beamnf
