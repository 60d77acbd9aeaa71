#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "neutral/designer.hpp"
#include "neutral/geometry.hpp"
#include "neutral/laurent.hpp"
#include "neutral/newtonian.hpp"
#include "neutral/shapesearch.hpp"
#include "neutral/transmission.hpp"

namespace neutral::io {

using json = nlohmann::json;

/// Rejects any key of `obj` not in `allowed`; `where` names the object in messages.
void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where);

/// Number, or the strings "inf" / "infinity". Negative and NaN are rejected.
double conductivity_from_json(const json& j, std::string_view where);
json conductivity_to_json(double s);

/// {"fourier": [[re, im], ...], "k_min": int}
Curve curve_from_json(const json& j);
json to_json(const Curve& c);

/// {"coeffs": {"1": a1, "-1": am1, ...}, "r0": real}; coefficients are real
/// numbers or [re, im] pairs.
LaurentMap laurent_from_json(const json& j);
json to_json(const LaurentMap& m);

json to_json(const DesignResult& d);
json to_json(const ConductivityProfile& p);
json to_json(const NeutralityReport& r);
json to_json(const LaurentClassification& c);
json to_json(const QuadraticFit& f);
json to_json(const IdentityCheck& c);
json to_json(const FreeBvpReport& r);
json to_json(const ShapePoint& p);
json to_json(const SearchResult& r);

/// FNV-1a over the compact dump; hex, 16 digits.
std::string config_hash(const json& config);

/// RFC 4180 table; numbers written with round-trip precision.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& row(std::initializer_list<double> values);
  Csv& row(const std::vector<double>& values);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

std::string csv_field(std::string_view s);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace neutral::io
