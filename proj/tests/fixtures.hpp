#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "cardest/schema.hpp"

namespace cardest::testing {

/// Three-table chain schema A -(a_id)- B -(b_id)- C written to a temp
/// directory.  Small enough that every join can be enumerated by hand.
struct ChainFixture {
  std::filesystem::path dir;
  JoinSchema schema;

  explicit ChainFixture(const std::string& tag = "chain") {
    dir = std::filesystem::temp_directory_path() / ("cardest_fixture_" + tag);
    std::filesystem::create_directories(dir);
    write("a.csv", "a_id,a_v\n1,x\n2,y\n");
    write("b.csv", "a_id,b_id,b_v\n1,10,p\n1,20,q\n3,10,r\n");
    write("c.csv", "b_id,c_v\n10,m\n10,n\n30,o\n");
    write("schema.json", R"({
      "tables": [
        {"name": "A", "csv": "a.csv", "attrs": [{"name": "a_v"}]},
        {"name": "B", "csv": "b.csv", "attrs": [{"name": "b_v"}]},
        {"name": "C", "csv": "c.csv", "attrs": [{"name": "c_v"}]}
      ],
      "joins": [
        {"left_table": "A", "left_key": "a_id", "right_table": "B", "right_key": "a_id"},
        {"left_table": "B", "left_key": "b_id", "right_table": "C", "right_key": "b_id"}
      ]
    })");
    schema = load_schema((dir / "schema.json").string());
  }
  ~ChainFixture() { std::filesystem::remove_all(dir); }
  void write(const std::string& name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    out << body;
  }
};

}  // namespace cardest::testing
