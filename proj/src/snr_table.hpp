#pragma once

#include <array>

namespace bnmfse::detail {

struct SnrShapePoint {
  double snr_db;
  double shape;  // ML gamma shape of |x|; decreasing in snr_db
};

extern const std::array<SnrShapePoint, 66> kSnrShapeTable;

}  // namespace bnmfse::detail
