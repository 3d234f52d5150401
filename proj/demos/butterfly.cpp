// Discrete Backlund transform of a random butterfly closes after four steps.
#include <cstdio>
#include <random>

#include <sbk/polygons.hpp>

int main() {
  using namespace sbk;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  Vec2 P1{1, 0}, P2{0.4 + 0.3 * U(rng), 0.9 + 0.2 * U(rng)}, P3{-0.5 + 0.2 * U(rng), 0.8 + 0.2 * U(rng)};
  Vec2 P4 = poly::butterfly_fourth(P1, P2, P3);
  std::printf("butterfly: %d\n", poly::is_butterfly(P1, P2, P3, P4));
  auto B = poly::backlund_transform(std::vector<Vec2>{P1, P2, P3, P4}, {0.3, 0.7});
  std::printf("rail [P_i, Q_i] = %.15f, closure gap %.3e\n", B.rail, B.closure_gap);
  for (auto q : B.Q) std::printf("  Q = (% .12f, % .12f)\n", q.x, q.y);
}
