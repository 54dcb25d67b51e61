// JSON encodings of tensors, cones, instances and reports. Tensor indices are
// 1-based in files. Non-finite numbers are written as null.
#pragma once

#include "tcpkit/classifiers.hpp"
#include "tcpkit/complementary.hpp"
#include "tcpkit/solver.hpp"
#include "tcpkit/stability.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace tcpkit::io {

using json = nlohmann::ordered_json;

/// Malformed input. line/column are 1-based for syntax errors and 0 when the
/// problem is structural, in which case `path` names the offending element.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column, std::string path = {});
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& path() const { return path_; }

 private:
  int line_;
  int column_;
  std::string path_;
};

json parse_text(const std::string& text);
json read_file(const std::string& path);

json number(double v);
json to_json(const VectorXd& v);
VectorXd vector_from_json(const json& j, const std::string& path = "");

json to_json(const Tensor& a);
Tensor tensor_from_json(const json& j, const std::string& path = "");

json to_json(const PolyhedralCone& k);
PolyhedralCone cone_from_json(const json& j, const std::string& path = "");

json to_json(const TcpInstance& inst);
TcpInstance instance_from_json(const json& j);

json to_json(const IndexSet& s);  ///< sorted 1-based list
json to_json(const SearchBudget& b);
json to_json(const Verdict& v);
json to_json(const PrincipalSweep& s);
json to_json(const MembershipResult& m);
json to_json(const TcpSolution& s);
json to_json(const PerturbationReport& r);

}  // namespace tcpkit::io
