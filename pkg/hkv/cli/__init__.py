"""hkv CLI package. / hkv CLI 包。"""
