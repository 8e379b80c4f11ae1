# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause
