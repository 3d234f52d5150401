// Lame curves for a few (k, n) and their certified self-Backlund angles.
#include <cstdio>

#include <sbk/lame.hpp>

int main() {
  using namespace sbk;
  struct Case {
    int k, n;
    double omega_prime;
  } cases[] = {{3, 1, 0.5}, {5, 1, 0.3}, {5, 3, 0.3}, {7, 3, 0.2}};
  for (auto c : cases) {
    auto P = lame::solve_a(c.k, c.n, 0, c.omega_prime);
    auto C = lame::build_curve(P, 1024);
    auto R = lame::self_backlund_angles(P, 1024);
    std::printf("(k,n) = (%d,%d)  winding %d  angles:", c.k, c.n, C.winding);
    for (auto& A : R.angles) std::printf("  %.12f (c = %.6f)", A.alpha, A.c);
    std::printf("\n");
  }
}
