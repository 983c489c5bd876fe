"""
Artifact I/O: channel spec files, CSV tables and JSON reports, on local disk or under s3:// URIs.
"""
import sys
import importlib.util
from threading import Lock
from functools import lru_cache
from contextlib import suppress
from typing import Optional

S3_SCHEME = 's3://'


def _lazy_import_resources(name):
    if name in sys.modules:
        return sys.modules[name]
    spec = importlib.util.find_spec(name)
    loader = importlib.util.LazyLoader(spec.loader)
    spec.loader = loader
    module = importlib.util.module_from_spec(spec)
    sys.modules[name] = module
    loader.exec_module(module)
    return module


boto3 = _lazy_import_resources('boto3')
smart_open = _lazy_import_resources('smart_open')
# The cli only touches boto3 when an s3:// artifact is requested


def register_artifact_location(prefix: str, *, client=None, parameters: Optional[dict] = None):
    """
    Attach a boto3 s3 client and/or extra request parameters (ContentType, ServerSideEncryption, ...)
    to every artifact under an s3:// prefix
    """
    if not isinstance(prefix, str) or not is_s3_uri(prefix):
        raise TypeError(f'prefix argument have to be an {S3_SCHEME} uri string. got {prefix!r}')
    if parameters is not None and not isinstance(parameters, dict):
        raise TypeError(f'parameters argument have to be a dict type. got {type(parameters)}')
    if parameters is None and client is None:
        raise ValueError('user have to specify parameters or client arguments')
    configuration_map.set_configuration(prefix, client=client, arguments=parameters)


def is_s3_uri(uri: str) -> bool:
    return str(uri).startswith(S3_SCHEME)


def open(uri, *, mode='r', encoding=None, newline=None):
    uri = str(uri)
    if not is_s3_uri(uri):
        return smart_open.open(uri, mode=mode, encoding=encoding, newline=newline, compression='disable')

    client, config = configuration_map.get_configuration(uri)
    transport_params = {
        'defer_seek': True,
        'client': client,
        'client_kwargs': {
            'S3.Client.get_object': _update_kwargs_with_config(client.get_object, config=config),
            'S3.Client.create_multipart_upload': _update_kwargs_with_config(
                client.create_multipart_upload, config=config),
        },
    }
    return smart_open.open(
        uri=uri,
        mode=mode,
        encoding=encoding,
        newline=newline,
        compression='disable',
        transport_params=transport_params)


def read_text(uri) -> str:
    with open(uri, mode='r', encoding='utf-8') as stream:
        return stream.read()


def write_text(uri, text: str):
    with open(uri, mode='w', encoding='utf-8', newline='') as stream:
        stream.write(text)


def border_uri(uri) -> str:
    """
    >> border_uri('s3://bucket/region.csv')
    << 's3://bucket/region_border.csv'
    """
    uri = str(uri)
    if uri.endswith('.csv'):
        return uri[:-len('.csv')] + '_border.csv'
    return uri + '_border.csv'


def _parents(uri: str):
    """ s3://bucket/a/b.csv -> s3://bucket/a/, s3://bucket/, s3:// """
    key = uri[len(S3_SCHEME):].rstrip('/')
    parts = key.split('/') if key else []
    for stop in range(len(parts) - 1, -1, -1):
        yield S3_SCHEME + ''.join(f'{part}/' for part in parts[:stop])


def _update_kwargs_with_config(boto3_method, config, kwargs=None):
    kwargs = kwargs or {}
    if config is not None:
        kwargs.update({
            key: value
            for key, value in config.items()
            if key in _get_action_arguments(boto3_method)
        })
    return kwargs


@lru_cache()
def _get_action_arguments(action):
    docs = action.__doc__
    with suppress(AttributeError):
        docs = action.__doc__._generate()
    return set(
        line.replace(':param ', '').strip().strip(':')
        for line in docs.splitlines()
        if line.startswith(':param ')
    )


class _ArtifactConfigurationMap:
    def __init__(self):
        self.arguments = None
        self.clients = None
        self.setup_lock = Lock()
        self.is_setup = False

    def __repr__(self):
        return f'{type(self).__name__}' \
               f'(arguments={self.arguments}, clients={self.clients}, is_setup={self.is_setup})'

    @property
    def default_client(self):
        return boto3.client('s3')

    def set_configuration(self, prefix, *, client=None, arguments=None):
        self._delayed_setup()
        prefix = _normalize_prefix(prefix)
        if arguments is not None:
            self.arguments[prefix] = arguments
        if client is not None:
            self.clients[prefix] = client
        self.get_configuration.cache_clear()

    @lru_cache()
    def get_configuration(self, uri):
        self._delayed_setup()
        client = arguments = None
        for prefix in _lookup_chain(uri):
            if client is None and prefix in self.clients:
                client = self.clients[prefix]
            if arguments is None and prefix in self.arguments:
                arguments = self.arguments[prefix]
        return client, arguments

    def _delayed_setup(self):
        """ No boto3 client until an s3 artifact is actually used """
        with self.setup_lock:
            if not self.is_setup:
                self.arguments = {S3_SCHEME: {}}
                self.clients = {S3_SCHEME: self.default_client}
                self.is_setup = True


def _normalize_prefix(prefix: str) -> str:
    key = prefix[len(S3_SCHEME):].strip('/')
    return S3_SCHEME + (f'{key}/' if key else '')


def _lookup_chain(uri: str):
    yield uri
    yield from _parents(uri)


configuration_map = _ArtifactConfigurationMap()
