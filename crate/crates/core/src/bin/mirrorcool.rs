// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(mirrorcool::cli::main_entry());
}
