#include "semsearch/error.hpp"

namespace semsearch {

ParseError::ParseError(std::string path, std::size_t line, const std::string& what)
    : DataError(path + ":" + std::to_string(line) + ": " + what),
      path_(std::move(path)),
      line_(line) {}

DanglingReferenceError::DanglingReferenceError(std::string id, const std::string& context)
    : DataError("dangling reference '" + id + "' in " + context), id_(std::move(id)) {}

CycleError::CycleError(std::string member, const std::string& graph)
    : DataError("cycle in " + graph + " through '" + member + "'"), member_(std::move(member)) {}

}  // namespace semsearch
