from dpt.transfer import attention, direct_weights, extract_features, transfer
