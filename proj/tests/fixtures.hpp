#pragma once

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "dynamiqs/io.hpp"

// Byte-exact regression fixtures under tests/fixtures. Set
// DYNAMIQS_RECORD_FIXTURES=1 to (re)write them.
inline void expect_matches_fixture(const std::string& name, const dynamiqs::Bytes& actual) {
  const std::filesystem::path path = std::filesystem::path(DYNAMIQS_FIXTURE_DIR) / name;
  if (std::getenv("DYNAMIQS_RECORD_FIXTURES")) {
    dynamiqs::write_file(path, actual);
    return;
  }
  ASSERT_TRUE(std::filesystem::exists(path)) << "missing fixture " << path;
  EXPECT_EQ(dynamiqs::read_file(path), actual) << "fixture " << name << " changed";
}
