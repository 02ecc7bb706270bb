#pragma once

#include <json.hpp>
#include <string>

#include "meandim/embed.hpp"

namespace meandim {

using Json = nlohmann::ordered_json;

// Parse error carrying a location inside the document.
class JsonInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Json to_json(const SymbolicSystem& sys);
SymbolicSystem system_from_json(const Json& j);

Json to_json(const CylinderRegion& r);
CylinderRegion region_from_json(const Json& j);

Json to_json(const MarkerCertificate& cert);
MarkerCertificate marker_from_json(const Json& j);

Json to_json(const RankCheck& c);
Json to_json(const IndependenceCertificate& c);
IndependenceCertificate certificate_from_json(const Json& j);

Json to_json(const EmbeddingFunction& f);
EmbeddingFunction function_from_json(const Json& j, const SymbolicSystem& sys);

Json vec_json(const Vec& v);
Vec vec_from_json(const Json& j);

std::string dump(const Json& j);  // canonical text: two-space indent, trailing newline
Json parse_json_text(const std::string& text, const std::string& where);
Json read_json_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& content);
std::string sha256_hex(const std::string& data);
std::string read_file(const std::string& path);

}  // namespace meandim
