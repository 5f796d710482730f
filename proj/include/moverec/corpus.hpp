#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "moverec/ast.hpp"

namespace moverec {

// A set of parsed files. File paths are relative to the corpus root; the
// first path component names the project a file belongs to.
struct Corpus {
    std::vector<SourceUnit> units;

    std::vector<std::string> projects() const;
};

std::string project_of(std::string_view id_or_path);

struct ClassRef {
    const SourceUnit* unit = nullptr;
    const ClassDecl* cls = nullptr;
};

struct MethodRef {
    const SourceUnit* unit = nullptr;
    const ClassDecl* cls = nullptr;
    const MethodDecl* method = nullptr;
};

// Reads every `.java` file under `root` in sorted path order. Parse errors
// propagate with the file-relative position.
Corpus load_corpus(const std::filesystem::path& root);

// Writes each unit through the printer, creating directories as needed.
void write_corpus(const Corpus& corpus, const std::filesystem::path& root);

// Throws NotFound if the id does not resolve.
MethodRef find_enclosing(const Corpus& corpus, std::string_view method_id);
ClassRef find_class(const Corpus& corpus, std::string_view class_id);

// Name-based lookup of classes within one project. A name declared twice in
// the same project is ambiguous and does not resolve.
class ClassIndex {
public:
    explicit ClassIndex(const Corpus& corpus);

    const ClassDecl* resolve(std::string_view project, std::string_view class_name) const;
    const ClassDecl* by_id(std::string_view class_id) const;

private:
    std::map<std::pair<std::string, std::string>, const ClassDecl*, std::less<>> by_name_;
    std::map<std::string, const ClassDecl*, std::less<>> by_id_;
};

bool same_structure(const Corpus& a, const Corpus& b);

}  // namespace moverec
