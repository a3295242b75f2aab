// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracsim {

enum class QuadRule { clenshaw_curtis, gauss_patterson };

inline const char* to_string(QuadRule r) { return r == QuadRule::clenshaw_curtis ? "cc" : "gp"; }

inline QuadRule quad_rule_from_string(const std::string& s) {
  if (s == "cc" || s == "clenshaw-curtis") return QuadRule::clenshaw_curtis;
  if (s == "gp" || s == "gauss-patterson") return QuadRule::gauss_patterson;
  throw std::invalid_argument("unknown quadrature rule '" + s + "' (expected cc or gp)");
}

struct Quad1D {
  std::vector<double> nodes;    // ascending, in [0,1]
  std::vector<double> weights;  // normalized to the uniform measure (sum 1)
};

namespace detail {

// Nested Gauss-Patterson nodes/weights on [0,1], levels 0..5 (1,3,7,15,31,63 pts).
inline constexpr double kGpNodes0[] = {0.5};
inline constexpr double kGpWeights0[] = {1.0};
inline constexpr double kGpNodes1[] = {0.1127016653792583114821, 0.5, 0.8872983346207416885179};
inline constexpr double kGpWeights1[] = {
    0.2777777777777777777778, 0.4444444444444444444444, 0.2777777777777777777778
};
inline constexpr double kGpNodes2[] = {
    0.01975436564598985828825, 0.1127016653792583114821, 0.282878125326598720999, 0.5,
    0.717121874673401279001, 0.8872983346207416885179, 0.9802456343540101417118
};
inline constexpr double kGpWeights2[] = {
    0.05232811301323363259691, 0.1342440449341667203643, 0.2006987073879811114525, 0.2254582693292370711726,
    0.2006987073879811114525, 0.1342440449341667203643, 0.05232811301323363259691
};
inline constexpr double kGpNodes3[] = {
    0.003084018393622488895744, 0.01975436564598985828825, 0.05577038356387150055479,
    0.1127016653792583114821, 0.1894485266313867985297, 0.282878125326598720999, 0.3883066567855165591859,
    0.5, 0.6116933432144834408141, 0.717121874673401279001, 0.8105514733686132014703,
    0.8872983346207416885179, 0.9442296164361284994452, 0.9802456343540101417118, 0.9969159816063775111043
};
inline constexpr double kGpWeights3[] = {
    0.008500859814970130169514, 0.02580164149853986984846, 0.04646359765756226884295,
    0.06720762762189211017998, 0.08575595456819569039368, 0.100314264688494510517, 0.1095784292007937482018,
    0.1127552498991033436932, 0.1095784292007937482018, 0.100314264688494510517, 0.08575595456819569039368,
    0.06720762762189211017998, 0.04646359765756226884295, 0.02580164149853986984846,
    0.008500859814970130169514
};
inline constexpr double kGpNodes4[] = {
    0.000450937516166201168887, 0.003084018393622488895744, 0.009234425223129946566319,
    0.01975436564598985828825, 0.03517257128512997166494, 0.05577038356387150055479,
    0.08163703091556563224862, 0.1127016653792583114821, 0.1487518967542364606951, 0.1894485266313867985297,
    0.2343401281778121880139, 0.282878125326598720999, 0.3344323033710115834537, 0.3883066567855165591859,
    0.4437555284334066871271, 0.5, 0.5562444715665933128729, 0.6116933432144834408141,
    0.6655676966289884165463, 0.717121874673401279001, 0.7656598718221878119861, 0.8105514733686132014703,
    0.8512481032457635393049, 0.8872983346207416885179, 0.9183629690844343677514, 0.9442296164361284994452,
    0.9648274287148700283351, 0.9802456343540101417118, 0.9907655747768700534337, 0.9969159816063775111043,
    0.9995490624838337988311
};
inline constexpr double kGpWeights4[] = {
    0.001272390395780937207701, 0.004217282869660553123157, 0.008223024927193905466894,
    0.01290379904808832678232, 0.01797855165356466104839, 0.0232314466308789932707,
    0.0284897547470616787061, 0.0336038771479953517702, 0.03843981024950176552135,
    0.04287796002499517557709, 0.04681355499063223680833, 0.05015713930589778938565,
    0.05283494679011740487191, 0.05478921052796231911834, 0.05597843651047672844007,
    0.05637762836038434580357, 0.05597843651047672844007, 0.05478921052796231911834,
    0.05283494679011740487191, 0.05015713930589778938565, 0.04681355499063223680833,
    0.04287796002499517557709, 0.03843981024950176552135, 0.0336038771479953517702,
    0.0284897547470616787061, 0.0232314466308789932707, 0.01797855165356466104839,
    0.01290379904808832678232, 0.008223024927193905466894, 0.004217282869660553123157,
    0.001272390395780937207701
};
inline constexpr double kGpNodes5[] = {
    0.00006355593982119403102161, 0.000450937516166201168887, 0.001396870313889020461774,
    0.003084018393622488895744, 0.005657621226285260030736, 0.009234425223129946566319,
    0.01390856262570910171097, 0.01975436564598985828825, 0.02682857081329854742575,
    0.03517257128512997166494, 0.0448144215214978537511, 0.05577038356387150055479,
    0.06804603090315476142679, 0.08163703091556563224862, 0.09652973402489119407185,
    0.1127016653792583114821, 0.1301219778236526206614, 0.1487518967542364606951, 0.1685451699876097022695,
    0.1894485266313867985297, 0.2114021449739770925782, 0.2343401281778121880139, 0.2581909865270794862189,
    0.282878125326598720999, 0.3083203379006348265418, 0.3344323033710115834537, 0.3611250889890878424673,
    0.3883066567855165591859, 0.4158823742238962675088, 0.4437555284334066871271, 0.471827843476703605014,
    0.5, 0.528172156523296394986, 0.5562444715665933128729, 0.5841176257761037324912,
    0.6116933432144834408141, 0.6388749110109121575327, 0.6655676966289884165463, 0.6916796620993651734582,
    0.717121874673401279001, 0.7418090134729205137811, 0.7656598718221878119861, 0.7885978550260229074218,
    0.8105514733686132014703, 0.8314548300123902977305, 0.8512481032457635393049, 0.8698780221763473793386,
    0.8872983346207416885179, 0.9034702659751088059282, 0.9183629690844343677514, 0.9319539690968452385732,
    0.9442296164361284994452, 0.9551855784785021462489, 0.9648274287148700283351, 0.9731714291867014525742,
    0.9802456343540101417118, 0.986091437374290898289, 0.9907655747768700534337, 0.9943423787737147399693,
    0.9969159816063775111043, 0.9986031296861109795382, 0.9995490624838337988311, 0.999936444060178805969
};
inline constexpr double kGpWeights5[] = {
    0.0001816107409227653298468, 0.0006325782781150340056863, 0.001289524897342844136214,
    0.002108815220779427419542, 0.003057753411058623169839, 0.004111503978617964834629,
    0.005249123454810660949136, 0.006451900050175632812988, 0.007703375233279748901065,
    0.008989275784064135166448, 0.01029711695795635557459, 0.01161572331995513472163,
    0.01293483966360737345538, 0.01424487737291677430625, 0.01553677555584398243994,
    0.01680193857410386527087, 0.01803221639039128632005, 0.01921990512472776601932,
    0.02035775505847215946695, 0.02143898001250386724646, 0.02245726582681609870713,
    0.02340677749531400620132, 0.02428216520333659935797, 0.02507856965294976870684,
    0.0257916269760242293884, 0.02641747339505825993104, 0.02695274966763303196344,
    0.02739460526398143251611, 0.02774070217827968199392, 0.02798921825523815970378,
    0.0281388499156271506363, 0.02818881418019235869383, 0.0281388499156271506363,
    0.02798921825523815970378, 0.02774070217827968199392, 0.02739460526398143251611,
    0.02695274966763303196344, 0.02641747339505825993104, 0.0257916269760242293884,
    0.02507856965294976870684, 0.02428216520333659935797, 0.02340677749531400620132,
    0.02245726582681609870713, 0.02143898001250386724646, 0.02035775505847215946695,
    0.01921990512472776601932, 0.01803221639039128632005, 0.01680193857410386527087,
    0.01553677555584398243994, 0.01424487737291677430625, 0.01293483966360737345538,
    0.01161572331995513472163, 0.01029711695795635557459, 0.008989275784064135166448,
    0.007703375233279748901065, 0.006451900050175632812988, 0.005249123454810660949136,
    0.004111503978617964834629, 0.003057753411058623169839, 0.002108815220779427419542,
    0.001289524897342844136214, 0.0006325782781150340056863, 0.0001816107409227653298468
};

inline constexpr const double* kGpNodes[] = {kGpNodes0, kGpNodes1, kGpNodes2, kGpNodes3, kGpNodes4, kGpNodes5};
inline constexpr const double* kGpWeights[] = {kGpWeights0, kGpWeights1, kGpWeights2, kGpWeights3,
                                               kGpWeights4, kGpWeights5};

}  // namespace detail

/// Number of points of the 1D rule at a given level: 1, 2^l+1 for
/// Clenshaw-Curtis; 1, 3, 7, 15, 31, 63 for Gauss-Patterson.
inline int quad_point_count(QuadRule rule, int level) {
  if (level < 0) throw std::invalid_argument("quadrature level must be nonnegative");
  if (rule == QuadRule::clenshaw_curtis) return level == 0 ? 1 : (1 << level) + 1;
  if (level > 5) throw std::invalid_argument("Gauss-Patterson tabulated up to level 5 (63 points)");
  return (1 << (level + 1)) - 1;
}

/// Largest polynomial degree the rule integrates exactly.
inline int quad_exact_degree(QuadRule rule, int level) {
  int m = quad_point_count(rule, level);
  if (rule == QuadRule::clenshaw_curtis) return level == 0 ? 1 : m;  // odd point count, symmetric
  return level == 0 ? 1 : 3 * (1 << level) - 1;                      // 1, 5, 11, 23, 47, 95
}

/// Largest degree whose orthonormal projection the rule computes without
/// internal aliasing (half the exactness degree).
inline int quad_projection_degree(QuadRule rule, int level) { return quad_exact_degree(rule, level) / 2; }

/// Nested 1D quadrature on [0,1] for the uniform measure.
inline Quad1D quad_rule_1d(QuadRule rule, int level) {
  Quad1D q;
  if (rule == QuadRule::gauss_patterson) {
    int m = quad_point_count(rule, level);
    q.nodes.assign(detail::kGpNodes[level], detail::kGpNodes[level] + m);
    q.weights.assign(detail::kGpWeights[level], detail::kGpWeights[level] + m);
    return q;
  }
  if (level == 0) return {{0.5}, {1.0}};
  const int n = 1 << level;  // nodes x_j = (1 - cos(j pi / n)) / 2, j = 0..n
  q.nodes.resize(static_cast<size_t>(n) + 1);
  q.weights.assign(static_cast<size_t>(n) + 1, 0.0);
  for (int j = 0; j <= n; ++j) q.nodes[static_cast<size_t>(j)] = 0.5 * (1.0 - std::cos(j * M_PI / n));
  // classical Clenshaw-Curtis weights via the cosine-moment expansion
  for (int j = 0; j <= n; ++j) {
    double cj = (j == 0 || j == n) ? 1.0 : 2.0;
    double acc = 1.0;
    for (int k = 1; k <= n / 2; ++k) {
      double bk = (2 * k == n) ? 1.0 : 2.0;
      acc -= bk / (4.0 * k * k - 1.0) * std::cos(2.0 * k * j * M_PI / n);
    }
    q.weights[static_cast<size_t>(j)] = 0.5 * cj * acc / n;
  }
  return q;
}

}  // namespace fracsim
