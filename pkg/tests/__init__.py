# Test package for bose-sdp-core
