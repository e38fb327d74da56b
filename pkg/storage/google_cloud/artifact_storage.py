import os
import socket
from urllib.parse import urlparse

from core_data_modules.logging import Logger
from google.cloud import storage
from requests import ConnectionError, Timeout

log = Logger(__name__)

_MIN_CHUNK_SIZE_KIB = 256


def parse_gs_url(url):
    """
    Splits a gs URL into its bucket and blob names.

    :param url: URL of the form gs://<bucket-name>/<blob-name>.
    :type url: str
    :rtype: (str, str)
    """
    parsed_url = urlparse(url)
    if parsed_url.scheme != "gs" or parsed_url.netloc == "":
        raise ValueError(f"'{url}' is not a gs URL (i.e. of the form gs://bucket-name/blob-name)")
    return parsed_url.netloc, parsed_url.path.lstrip("/")


def _blob_at_url(storage_client, blob_url):
    bucket_name, blob_name = parse_gs_url(blob_url)
    return storage_client.bucket(bucket_name).blob(blob_name)


def _client(credentials_file_path):
    return storage.Client.from_service_account_json(credentials_file_path)


def download_blob(credentials_file_path, blob_url, max_retries=2):
    """
    Downloads the contents of a Google Cloud Storage blob, retrying on connection or timeout errors.

    :param credentials_file_path: Path to a credentials file for accessing the bucket.
    :type credentials_file_path: str
    :param blob_url: gs URL of the blob to download.
    :type blob_url: str
    :param max_retries: Maximum number of times to retry the download.
    :type max_retries: int
    :rtype: bytes
    """
    while True:
        try:
            log.info(f"Downloading blob '{blob_url}'...")
            data = _blob_at_url(_client(credentials_file_path), blob_url).download_as_bytes()
            log.info(f"Downloaded {len(data)} bytes")
            return data
        except (ConnectionError, socket.timeout, Timeout):
            if max_retries <= 0:
                log.error(f"Failed to download blob '{blob_url}'")
                raise
            max_retries -= 1
            log.warning(f"Failed to download due to connection/timeout error, retrying up to {max_retries + 1} "
                        f"more times")


def upload_file_to_blob(credentials_file_path, target_blob_url, f, max_retries=4, blob_chunk_size=100 * 1024):
    """
    Uploads a file to a Google Cloud Storage blob.

    On a connection or timeout error the upload is restarted with half the chunk size, until `max_retries` is used up
    or the chunk size would drop below 256KiB.

    :param credentials_file_path: Path to a credentials file for accessing the bucket.
    :type credentials_file_path: str
    :param target_blob_url: gs URL of the blob to upload to.
    :type target_blob_url: str
    :param f: File to upload, opened in binary mode.
    :type f: file-like
    :param max_retries: Maximum number of times to retry uploading the file.
    :type max_retries: int
    :param blob_chunk_size: Chunk size of the resumable upload, in KiB.
    :type blob_chunk_size: float
    """
    while True:
        try:
            log.info(f"Uploading file to blob '{target_blob_url}'...")
            blob = _blob_at_url(_client(credentials_file_path), target_blob_url)
            blob.chunk_size = int(blob_chunk_size * 1024)
            blob.upload_from_file(f)
            log.info("Uploaded file to blob")
            return
        except (ConnectionError, socket.timeout, Timeout):
            log.warning("Failed to upload due to connection/timeout error")
            if max_retries <= 0:
                log.error("Failed to upload file to blob")
                raise
            if blob_chunk_size / 2 < _MIN_CHUNK_SIZE_KIB:
                log.error(f"Not retrying because the next chunk size {blob_chunk_size / 2}KiB is below the minimum "
                          f"allowed ({_MIN_CHUNK_SIZE_KIB}KiB)")
                raise

            max_retries -= 1
            blob_chunk_size /= 2
            log.info(f"Retrying up to {max_retries + 1} more times with a reduced chunk size of {blob_chunk_size}KiB")
            # Resumable uploads restart from the beginning of the file.
            f.seek(0)


def upload_artifacts(credentials_file_path, target_url, paths):
    """
    Uploads run artifacts below a gs URL prefix, each to a blob named after the file.

    :param credentials_file_path: Path to a credentials file for accessing the bucket.
    :type credentials_file_path: str
    :param target_url: gs URL of the "directory" to upload to, e.g. gs://bucket/runs/2024-01-01.
    :type target_url: str
    :param paths: Paths of the files to upload.
    :type paths: iterable of str
    :return: gs URLs of the uploaded blobs.
    :rtype: list of str
    """
    parse_gs_url(target_url)
    blob_urls = []
    for path in paths:
        blob_url = f"{target_url.rstrip('/')}/{os.path.basename(path)}"
        with open(path, "rb") as f:
            upload_file_to_blob(credentials_file_path, blob_url, f)
        blob_urls.append(blob_url)
    log.info(f"Uploaded {len(blob_urls)} artifacts to '{target_url}'")
    return blob_urls
