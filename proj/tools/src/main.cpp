// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#include "qmimo_cli/app.hpp"

int main(int argc, char** argv) { return qmimo_cli::run_cli(argc, argv); }
