// SPDX-License-Identifier: Apache-2.0
#include "sqgspec/cli.hpp"

int main(int argc, char** argv) { return sqgspec::cli_main(argc, argv); }
