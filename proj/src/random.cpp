#include "momentlab/random.hpp"

namespace momentlab {

CMatrix Rng::ginibre(std::size_t rows, std::size_t cols)
{
  CMatrix g(rows, cols);
  for (auto& v : g.data()) v = complex_normal();
  return g;
}

CMatrix Rng::haar_unitary(std::size_t n)
{
  CMatrix g = ginibre(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        Complex d{};
        for (std::size_t i = 0; i < n; ++i) d += std::conj(g(i, k)) * g(i, j);
        for (std::size_t i = 0; i < n; ++i) g(i, j) -= d * g(i, k);
      }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += std::norm(g(i, j));
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) g(i, j) /= nrm;
  }
  return g;
}

CMatrix Rng::hermitian(std::size_t n)
{
  const CMatrix g = ginibre(n, n);
  return g + g.adjoint();
}

CMatrix Rng::psd(std::size_t n, std::size_t rank)
{
  const CMatrix g = ginibre(rank, n);
  return g.adjoint() * g;
}

}  // namespace momentlab
